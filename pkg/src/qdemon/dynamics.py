"""Forward Lindblad evolution of the joint state and backward propagation of effects."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .constants import BOLTZMANN_K, PLANCK_H
from .device import DeviceParams, DriveEnvelope, diagonal_energies
from .errors import IntegratorAccuracyError, InvalidStateError, ShapeError
from .integrate import integrate
from .kernels import get_backend
from .operators import hermitize, tensor, thermal_state

DEFAULT_TOL = 1e-8
VALIDATION_TOL = 1e-6
OBSERVABLES = ("sx", "sy", "sz", "nbar", "p0_cavity", "trace_err")


@dataclass
class Trajectory:
    t: np.ndarray
    observables: dict[str, np.ndarray]
    states: dict[float, np.ndarray] = field(default_factory=dict)
    final_state: np.ndarray | None = None
    min_eigenvalues: np.ndarray | None = None
    stats: object = None

    def __getitem__(self, name):
        return self.observables[name]

    @property
    def p_e(self) -> np.ndarray:
        return 0.5 * (1 + self.observables["sz"])

    def state_at(self, t: float) -> np.ndarray:
        key = min(self.states, key=lambda s: abs(s - t))
        if abs(key - t) > 1e-15 + 1e-9 * abs(t):
            raise KeyError(f"no stored state at t={t}")
        return self.states[key]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("t_s",) + OBSERVABLES)
        for i, t in enumerate(self.t):
            w.writerow([repr(float(t))] + [repr(float(self.observables[k][i])) for k in OBSERVABLES])
        return buf.getvalue()


@dataclass
class EffectOperator:
    """Measurement effect ``E`` (Heisenberg picture) with its tomography label."""

    matrix: np.ndarray
    label: tuple = ()

    def validate(self, tol: float = VALIDATION_TOL) -> "EffectOperator":
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise InvalidStateError("effect operator is not Hermitian")
        lam = np.linalg.eigvalsh(hermitize(m))
        if lam[0] < -tol or lam[-1] > 1 + tol:
            raise IntegratorAccuracyError(
                f"effect spectrum [{lam[0]:.3e}, {lam[-1]:.6f}] left [0, 1] by more than {tol:g}; reduce tol"
            )
        return self


def _n_trunc_of(rho, params, n_trunc):
    dim = rho.shape[0]
    if n_trunc is None:
        n_trunc = dim // 2 - 1
    if rho.shape != (2 * (n_trunc + 1), 2 * (n_trunc + 1)):
        raise ShapeError(f"state of shape {rho.shape} is not on the joint space with n_trunc={n_trunc}")
    return n_trunc


def _drive_of(sequence):
    if sequence is None:
        return DriveEnvelope(), ()
    return sequence.drive(), tuple(sequence.breakpoints())


def make_generator(params: DeviceParams, drive: DriveEnvelope, n_trunc: int, *, adjoint=False, adjoint_includes_excitation=False, backend=None):
    """Return ``f(t, y)`` evaluating the (adjoint) Lindbladian on a D x D array."""
    kernel = get_backend(backend)
    h_diag = diagonal_energies(params, n_trunc, drive.detuning_S, drive.detuning_D)
    n_fock = n_trunc + 1
    kappa = params.kappa_rate
    g_phi_half = params.gamma_phi / 2
    if adjoint and not adjoint_includes_excitation:
        # channel set of the printed adjoint equation: kappa, gamma_1 and gamma_phi/2 only
        g_down, g_up = params.gamma_1, 0.0
    else:
        g_down, g_up = params.gamma_down, params.gamma_up
    coefficients = drive.coefficients

    def rhs(t, y):
        cq, eps = coefficients(t)
        out = np.empty_like(y)
        kernel(y, out, h_diag, n_fock, cq, eps, kappa, g_down, g_up, g_phi_half, adjoint)
        return out

    return rhs


def observables_of(rho: np.ndarray, n_fock: int) -> dict[str, float]:
    r4 = rho.reshape(2, n_fock, 2, n_fock)
    diag = np.real(np.diagonal(rho)).reshape(2, n_fock)
    sp = np.trace(r4[0, :, 1, :])  # <sigma_+> = sum_n rho_{gn,en}
    n = np.arange(n_fock)
    return {
        "sx": 2 * sp.real,
        "sy": 2 * sp.imag,
        "sz": diag[1].sum() - diag[0].sum(),
        "nbar": float(n @ diag.sum(axis=0)),
        "p0_cavity": diag[0, 0] + diag[1, 0],
        "trace_err": float(abs(np.trace(rho) - 1)),
    }


def evolve(
    rho0: np.ndarray,
    params: DeviceParams,
    sequence,
    t_grid,
    tol: float = DEFAULT_TOL,
    *,
    n_trunc: int | None = None,
    fixed_step: float | None = None,
    store_times=(),
    check_positivity: bool | int = True,
    backend: str | None = None,
) -> Trajectory:
    """Solve the master equation from ``rho0`` through ``t_grid``.

    ``sequence`` is a ``PulseSequence`` (or ``None`` for free evolution).
    Observables are recorded at every grid time, full states only at
    ``store_times`` (snapped to the grid) and at the end.  Positivity is
    checked every ``check_positivity`` output steps (``True`` = every step).
    """
    rho0 = np.asarray(rho0, dtype=complex)
    n_trunc = _n_trunc_of(rho0, params, n_trunc)
    if tol <= 0:
        raise ValueError("tol must be positive")
    t_grid = np.asarray(t_grid, dtype=float)
    drive, bps = _drive_of(sequence)
    rhs = make_generator(params, drive, n_trunc, backend=backend)
    n_fock = n_trunc + 1

    obs = {k: np.empty(t_grid.size) for k in OBSERVABLES}
    min_eigs = np.full(t_grid.size, np.nan)
    store_idx = {int(np.argmin(np.abs(t_grid - s))) for s in store_times}
    states = {}
    every = 1 if check_positivity is True else int(check_positivity)

    def on_output(i, t, y):
        for k, v in observables_of(y, n_fock).items():
            obs[k][i] = v
        if every and (i % every == 0 or i == t_grid.size - 1):
            lam = np.linalg.eigvalsh(hermitize(y))[0]
            min_eigs[i] = lam
            if lam < -VALIDATION_TOL:
                raise IntegratorAccuracyError(
                    f"state lost positivity at t={t:.4e} s (min eigenvalue {lam:.3e}); use a smaller tol"
                )
        if i in store_idx:
            states[float(t_grid[i])] = y.copy()

    y_end, stats = integrate(rhs, rho0, t_grid, rtol=tol, atol=tol, fixed_step=fixed_step, breakpoints=bps, on_output=on_output)
    states[float(t_grid[-1])] = y_end
    return Trajectory(t_grid, obs, states, y_end, min_eigs, stats)


def evolve_adjoint(
    e_final: EffectOperator | np.ndarray,
    params: DeviceParams,
    sequence,
    t_grid,
    tol: float = DEFAULT_TOL,
    *,
    adjoint_includes_excitation: bool = False,
    n_trunc: int | None = None,
    fixed_step: float | None = None,
    validate: bool = True,
    backend: str | None = None,
) -> EffectOperator:
    """Propagate an effect from ``t_grid[-1]`` back to ``t_grid[0]``.

    Integrates ``dE/dt = -L^+(E)`` backward, so that
    ``Tr(rho(T) E(T)) = Tr(rho(0) E(0))`` for states evolved by ``evolve``.
    """
    if isinstance(e_final, EffectOperator):
        label, m = e_final.label, e_final.matrix
    else:
        label, m = (), e_final
    m = np.asarray(m, dtype=complex)
    n_trunc = _n_trunc_of(m, params, n_trunc)
    drive, bps = _drive_of(sequence)
    gen = make_generator(params, drive, n_trunc, adjoint=True, adjoint_includes_excitation=adjoint_includes_excitation, backend=backend)

    def rhs(t, y):
        return -gen(t, y)

    t_back = np.asarray(t_grid, dtype=float)[::-1]
    y0, _ = integrate(rhs, m, t_back, rtol=tol, atol=tol, fixed_step=fixed_step, breakpoints=bps)
    eff = EffectOperator(hermitize(y0), label)
    return eff.validate() if validate else eff


def boltzmann_ratio(f: float, T: float) -> float:
    if T <= 0:
        return 0.0
    return float(np.exp(-PLANCK_H * f / (BOLTZMANN_K * T)))


def thermal_qubit(p_e: float) -> np.ndarray:
    return np.diag([1 - p_e, p_e]).astype(complex)


def equilibrium_state(params: DeviceParams, n_trunc: int | None = None) -> np.ndarray:
    """Joint equilibrium ``rho_S^0 (x) rho_D^0``: qubit at ``p_e0``, cavity thermal at ``T_D0``."""
    n_trunc = params.n_trunc if n_trunc is None else n_trunc
    cav = thermal_state(boltzmann_ratio(params.f_D, params.T_D0), n_trunc)
    return tensor(thermal_qubit(params.p_e0), cav)


def steady_state_population(params: DeviceParams) -> float:
    """Excited-state population of the equilibrium initializer."""
    return float(params.p_e0)
