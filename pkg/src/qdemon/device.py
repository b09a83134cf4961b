"""Physical model of the qubit/cavity device.

Frequencies are stored in Hz exactly as quoted for the experiment and turned
into angular rates (x 2 pi) only when a generator is assembled.  ``kappa_D`` is
stored in its "/2 pi" form, so the cavity Lindblad rate is ``2 pi kappa_D``;
``gamma_1`` and ``gamma_phi`` are plain inverse times.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .constants import DEMON_T0, TWO_PI
from .errors import ParameterError, WeakDriveViolated
from .operators import JointSpace


@dataclass(frozen=True)
class DeviceParams:
    f_S: float = 7.088e9
    f_D: float = 7.913e9
    chi: float = 33.8e6
    chi2: float = 0.9e6
    kerr_K: float = 0.7e6
    kappa_D: float = 0.77e6
    gamma_1: float = 1 / 2.2e-6
    gamma_phi: float = 85e3
    p_e0: float = 0.036
    gamma_b: float | None = None
    F_pi: float = 0.92
    n_trunc: int = 45
    T_D0: float = DEMON_T0

    def __post_init__(self):
        if self.gamma_b is None:
            object.__setattr__(self, "gamma_b", self.gamma_1)
        for name in ("chi", "chi2", "kerr_K", "kappa_D", "gamma_1", "gamma_phi", "gamma_b"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")
        if not 0 <= self.p_e0 <= 1:
            raise ParameterError("p_e0 must lie in [0, 1]")
        if not 0 < self.F_pi <= 1:
            raise ParameterError("F_pi must lie in (0, 1]")
        if self.gamma_b > self.gamma_1 * (1 + 1e-12):
            raise ParameterError("gamma_b cannot exceed gamma_1")
        if int(self.n_trunc) != self.n_trunc or self.n_trunc < 1:
            raise ParameterError("n_trunc must be an integer >= 1")
        if self.T_D0 < 0:
            raise ParameterError("T_D0 must be >= 0")

    @property
    def gamma_down(self) -> float:
        return (1 - self.p_e0) * self.gamma_1

    @property
    def gamma_up(self) -> float:
        return self.p_e0 * self.gamma_1

    @property
    def kappa_rate(self) -> float:
        """Cavity energy-decay rate in 1/s."""
        return TWO_PI * self.kappa_D

    def replace(self, **changes) -> "DeviceParams":
        return dataclasses.replace(self, **changes)

    def without_decoherence(self) -> "DeviceParams":
        return self.replace(kappa_D=0.0, gamma_1=0.0, gamma_phi=0.0, gamma_b=0.0)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "DeviceParams":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown DeviceParams keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DeviceParams":
        return cls.from_dict(json.loads(text))


def _zero(t):
    return 0.0


@dataclass(frozen=True)
class DriveEnvelope:
    """Drive amplitudes in the frame rotating at ``f_S`` (qubit) and ``f_D`` (cavity).

    ``qubit_amp(t)`` is the Rabi rate in rad/s, ``cavity_amp(t)`` the complex
    cavity drive in sqrt(photons)/s.  ``qubit_coefficient`` returns the factor
    multiplying ``sigma_+`` in the Hamiltonian (carrier phase ramps included).
    """

    qubit_amp: Callable[[float], float] = _zero
    qubit_phase: float = np.pi / 2
    cavity_amp: Callable[[float], complex] = _zero
    detuning_S: float = 0.0
    detuning_D: float = 0.0
    qubit_coefficient: Callable[[float], complex] | None = field(default=None, compare=False)

    def coefficients(self, t: float) -> tuple[complex, complex]:
        if self.qubit_coefficient is not None:
            cq = self.qubit_coefficient(t)
        else:
            cq = 0.5 * self.qubit_amp(t) * np.exp(-1j * self.qubit_phase)
        return complex(cq), complex(self.cavity_amp(t))


def diagonal_energies(params: DeviceParams, n_trunc: int, detuning_S: float = 0.0, detuning_D: float = 0.0) -> np.ndarray:
    """Diagonal of the undriven generator (rad/s), joint qubit-major order."""
    n = np.arange(n_trunc + 1, dtype=float)
    g = -params.kerr_K * n**2 - detuning_D * n
    e = g - params.chi * n + params.chi2 * n**2 - detuning_S
    return TWO_PI * np.concatenate([g, e])


def build_hamiltonian(params: DeviceParams, drive: DriveEnvelope | None, t: float = 0.0, n_trunc: int | None = None) -> np.ndarray:
    """Dense rotating-frame Hamiltonian ``H / hbar`` in rad/s."""
    n_trunc = params.n_trunc if n_trunc is None else n_trunc
    sp = JointSpace(n_trunc)
    drive = drive or DriveEnvelope()
    h = np.diag(diagonal_energies(params, n_trunc, drive.detuning_S, drive.detuning_D)).astype(complex)
    cq, eps = drive.coefficients(t)
    h += cq * sp.sp + np.conj(cq) * sp.sm
    h += eps * sp.d.conj().T + np.conj(eps) * sp.d
    return h


def collapse_operators(params: DeviceParams, n_trunc: int | None = None) -> list[tuple[float, np.ndarray]]:
    """``(rate, jump)`` pairs of the master equation, in the fixed order d, s-, s+, sz."""
    n_trunc = params.n_trunc if n_trunc is None else n_trunc
    sp = JointSpace(n_trunc)
    return [
        (params.kappa_rate, sp.d),
        (params.gamma_down, sp.sm),
        (params.gamma_up, sp.sp),
        (params.gamma_phi / 2, sp.sz),
    ]


def stark_dephasing_response(params: DeviceParams, delta: float, eps_d, t_grid, *, bound: float = 2.0):
    """Coherent amplitudes of the weakly driven cavity for each qubit state.

    ``eps_d`` is a complex drive (1/s) or a callable of time.  Returns
    ``(alpha_g, alpha_e, f_stark_Hz, gamma_d)`` sampled on ``t_grid``; both
    amplitudes start from vacuum at ``t_grid[0]``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    eps = eps_d if callable(eps_d) else (lambda t, c=complex(eps_d): c)
    half_kappa = params.kappa_rate / 2
    chi_eff = params.chi - params.chi2
    lam = np.array([1j * TWO_PI * delta - half_kappa, 1j * TWO_PI * (delta + chi_eff) - half_kappa])

    def rhs(t, y):
        return lam * y + eps(t)

    if t_grid.size == 1:
        alphas = np.zeros((2, 1), dtype=complex)
    else:
        sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), np.zeros(2, dtype=complex), t_eval=t_grid, rtol=1e-10, atol=1e-12, method="DOP853")
        alphas = sol.y
    alpha_g, alpha_e = alphas
    if np.max(np.abs(alphas)) > bound:
        raise WeakDriveViolated(f"|alpha| reached {np.max(np.abs(alphas)):.3g} > {bound}; drive too strong for the linear model")
    prod = np.conj(alpha_g) * alpha_e
    return alpha_g, alpha_e, chi_eff * prod.real, chi_eff * prod.imag


def steady_state_alpha(params: DeviceParams, delta: float, eps_d: complex, qubit: str = "g") -> complex:
    shift = 0.0 if qubit == "g" else params.chi - params.chi2
    return -eps_d / (1j * TWO_PI * (delta + shift) - params.kappa_rate / 2)
