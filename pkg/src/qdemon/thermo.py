"""Power, work, heat, temperatures and the synthetic heterodyne detector."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .constants import BOLTZMANN_K, PLANCK_H
from .errors import GainModelDomainError, InconsistentContrast, InsufficientData, NegativeTemperature, ParameterError


def photon_energy(f: float) -> float:
    return PLANCK_H * f


# ---------------------------------------------------------------- power / work

def extracted_power(traj, omega, gamma_b: float):
    """Photon rates ``(total, stimulated, spontaneous)`` in photons/s.

    ``P/hf_S = gamma_b (1 + <sz>)/2 + (Omega/2) <sx>``; the stimulated term is
    work delivered to the drive, the spontaneous one heat.
    """
    sx = np.asarray(traj["sx"])
    sz = np.asarray(traj["sz"])
    omega = np.broadcast_to(np.asarray(omega, dtype=float), sx.shape)
    p_work = 0.5 * omega * sx
    p_heat = gamma_b * 0.5 * (1 + sz)
    return p_work + p_heat, p_work, p_heat


def internal_energy(rho_S: np.ndarray, f_S: float) -> float:
    """``U_S = h f_S <e|rho_S|e>`` in joules."""
    rho_S = np.asarray(rho_S)
    if rho_S.shape != (2, 2):
        raise ParameterError("internal_energy expects a qubit density matrix")
    return photon_energy(f_S) * float(np.real(rho_S[1, 1]))


@dataclass
class WorkRecord:
    t_grid: np.ndarray
    power_over_hfs: np.ndarray
    work_power: np.ndarray
    heat_power: np.ndarray
    work_over_hfs: float
    heat_over_hfs: float
    net_heat_over_hfs: float
    delta_U_over_hfs: float
    f_S: float
    init_label: str = ""
    nbar: float = float("nan")
    T_K: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def work_J(self) -> float:
        return self.work_over_hfs * photon_energy(self.f_S)

    @property
    def balance_residual(self) -> float:
        """``W + dU_S + Q`` with ``Q`` the net heat released to the bath (hf_S units)."""
        return self.work_over_hfs + self.delta_U_over_hfs + self.net_heat_over_hfs

    @property
    def spont_balance_residual(self) -> float:
        """Same balance booking only the spontaneous-emission channel as heat."""
        return self.work_over_hfs + self.delta_U_over_hfs + self.heat_over_hfs

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("t_s", "p_total", "p_work", "p_heat"))
        for row in zip(self.t_grid, self.power_over_hfs, self.work_power, self.heat_power):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "work_hfs": self.work_over_hfs,
            "work_J": self.work_J,
            "heat_hfs": self.heat_over_hfs,
            "net_heat_hfs": self.net_heat_over_hfs,
            "delta_U_hfs": self.delta_U_over_hfs,
            "nbar": self.nbar,
            "prep": self.init_label,
            "T_K": self.T_K,
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    @staticmethod
    def combine(records, weights, init_label="", T_K=None) -> "WorkRecord":
        """Probability mixture of runs; time series are kept from the first record."""
        weights = np.asarray(weights, dtype=float)
        if records and not np.isclose(weights.sum(), 1.0):
            raise ParameterError("mixture weights must sum to 1")
        mix = lambda name: float(sum(w * getattr(r, name) for w, r in zip(weights, records)))
        first = records[0]
        same_grid = all(r.t_grid.shape == first.t_grid.shape and np.allclose(r.t_grid, first.t_grid) for r in records)
        series = (lambda name: sum(w * getattr(r, name) for w, r in zip(weights, records))) if same_grid else (lambda name: getattr(first, name))
        return WorkRecord(
            first.t_grid, series("power_over_hfs"), series("work_power"), series("heat_power"),
            mix("work_over_hfs"), mix("heat_over_hfs"), mix("net_heat_over_hfs"), mix("delta_U_over_hfs"),
            first.f_S, init_label, mix("nbar"), T_K,
        )


def work(traj, params, sequence, *, window=None, init_label: str = "", nbar: float = float("nan"), T_K=None) -> WorkRecord:
    """Integrate the power of ``traj`` over the extraction window of ``sequence``.

    The trajectory grid must contain the window endpoints.  ``Q`` is booked
    twice: the spontaneous channel ``gamma_b p_e`` and the net exchange with
    the bath ``gamma_down p_e - gamma_up p_g`` that closes the balance.
    """
    t = np.asarray(traj.t)
    t0, t1 = window if window is not None else sequence.window("extract")
    tol = 1e-15 + 1e-9 * max(abs(t0), abs(t1))
    mask = (t >= t0 - tol) & (t <= t1 + tol)
    if mask.sum() < 2 or abs(t[mask][0] - t0) > tol or abs(t[mask][-1] - t1) > tol:
        raise ParameterError("trajectory grid must contain the extraction window endpoints")
    ts = t[mask]
    omega = sequence.rabi_rate(ts)
    sub = {k: np.asarray(traj[k])[mask] for k in ("sx", "sz")}
    total, p_work, p_heat = extracted_power(sub, omega, params.gamma_b)
    pe = 0.5 * (1 + sub["sz"])
    net = params.gamma_down * pe - params.gamma_up * (1 - pe)
    return WorkRecord(
        t_grid=ts,
        power_over_hfs=total,
        work_power=p_work,
        heat_power=p_heat,
        work_over_hfs=float(trapezoid(p_work, ts)),
        heat_over_hfs=float(trapezoid(p_heat, ts)),
        net_heat_over_hfs=float(trapezoid(net, ts)),
        delta_U_over_hfs=float(pe[-1] - pe[0]),
        f_S=params.f_S,
        init_label=init_label,
        nbar=nbar,
        T_K=T_K,
    )


# ---------------------------------------------------------------- temperatures

def boltzmann_population(T: float, f: float) -> float:
    """Excited population ``1 / (1 + exp(hf/kT))`` of a two-level system."""
    if T < 0:
        raise NegativeTemperature("temperature must be >= 0")
    if T == 0:
        return 0.0
    if np.isinf(T):
        return 0.5
    return float(1.0 / (1.0 + np.exp(PLANCK_H * f / (BOLTZMANN_K * T))))


def temperature_from_population(p_e: float, f: float) -> float:
    if p_e >= 0.5:
        raise NegativeTemperature(f"p_e={p_e} >= 0.5 has no positive temperature")
    if p_e <= 0:
        return 0.0
    return float(PLANCK_H * f / (BOLTZMANN_K * np.log((1 - p_e) / p_e)))


def demon_temperature_from_P1(p1: float, f_D: float) -> float:
    """Cavity temperature whose Maxwell-Boltzmann weight ``(1 - r) r`` of Fock 1 equals ``p1``.

    The smaller root ``r = (1 - sqrt(1 - 4 p1)) / 2`` is the physical one.
    """
    if not 0 <= p1 <= 0.25:
        raise ParameterError("p1 must lie in [0, 1/4]")
    if p1 == 0:
        return 0.0
    r = 2 * p1 / (1 + np.sqrt(1 - 4 * p1))  # stable form of the smaller root
    return float(PLANCK_H * f_D / (BOLTZMANN_K * np.log(1 / r)))


def fock_distribution(T: float, f: float, n_max: int) -> np.ndarray:
    """Maxwell-Boltzmann weights ``(1 - r) r^n`` for ``n = 0..n_max``, ``r = exp(-hf/kT)``."""
    r = 0.0 if T <= 0 else np.exp(-PLANCK_H * f / (BOLTZMANN_K * T))
    return (1 - r) * r ** np.arange(n_max + 1)


def contrast_values(T: float, F_pi: float, f_S: float) -> tuple[float, float]:
    """Rabi contrasts ``(C_eq, C_pi)`` of a two-level qubit at temperature ``T``."""
    pe = boltzmann_population(T, f_S)
    return pe, F_pi * (1 - pe) + (1 - F_pi) * pe


def temperature_from_contrast(c_eq: float, c_pi: float, F_pi: float, f_S: float) -> float:
    """Invert ``C_pi / C_eq = 1 + F_pi (e^x - 1)`` with ``x = h f_S / k_B T``."""
    if not (c_eq > 0 and c_pi > 0):
        raise InconsistentContrast("contrasts must be positive")
    ratio = c_pi / c_eq
    if ratio <= 1:
        raise InconsistentContrast(f"C_pi/C_eq = {ratio:.4f} <= 1")
    if not 0 < F_pi <= 1:
        raise ParameterError("F_pi must lie in (0, 1]")
    x = np.log1p((ratio - 1) / F_pi)
    return float(PLANCK_H * f_S / (BOLTZMANN_K * x))


def landauer_ratio(w: float, T: float) -> float:
    """Work ``w`` (J) in units of the Landauer cost ``k_B T ln 2``."""
    if T <= 0:
        raise ParameterError("T must be positive")
    return float(w / (BOLTZMANN_K * T * np.log(2)))


# ---------------------------------------------------------------- heterodyne

@dataclass(frozen=True)
class GainModel:
    """``sqrt(G(Omega)) = sqrt(g0) (1 - Omega/omega_inf)``; ``offset`` adds to the power."""

    g0: float
    omega_inf: float = np.inf
    offset: float = 0.0

    def __post_init__(self):
        if not self.g0 > 0:
            raise ParameterError("g0 must be positive")
        if not self.omega_inf > 0:
            raise ParameterError("omega_inf must be positive")

    def amplitude_gain(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        if np.any(omega >= self.omega_inf):
            raise GainModelDomainError(f"Omega reaches omega_inf={self.omega_inf:.4g} rad/s")
        return np.sqrt(self.g0) * (1 - omega / self.omega_inf)

    def to_dict(self) -> dict:
        return {"g0": self.g0, "omega_inf": None if np.isinf(self.omega_inf) else self.omega_inf, "offset": self.offset}

    @classmethod
    def from_dict(cls, d: dict) -> "GainModel":
        w = d.get("omega_inf")
        return cls(float(d["g0"]), np.inf if w is None else float(w), float(d.get("offset", 0.0)))


def drive_amplitude(omega, gamma_b: float):
    """Incoming field ``beta_in`` (real, negative) producing Rabi rate ``omega``."""
    return -np.asarray(omega, dtype=float) / (2 * np.sqrt(gamma_b))


def synthesize_heterodyne(traj, gain: GainModel, omega, gamma_b: float, beta_in=None):
    """Averaged ``(I, Q, I^2 + Q^2)`` records for a trajectory.

    ``b_out = beta_in - sqrt(gamma_b) <sigma_->`` with ``<sigma_-> = (<sx> - i<sy>)/2``
    and the photon rate ``|beta_in|^2 + gamma_b (1+<sz>)/2 + (Omega/2)<sx>``.
    """
    sx = np.asarray(traj["sx"], dtype=float)
    sy = np.asarray(traj["sy"], dtype=float) if "sy" in getattr(traj, "observables", traj) else np.zeros_like(sx)
    sz = np.asarray(traj["sz"], dtype=float)
    omega = np.broadcast_to(np.asarray(omega, dtype=float), sx.shape)
    beta = drive_amplitude(omega, gamma_b) if beta_in is None else np.broadcast_to(np.asarray(beta_in, dtype=float), sx.shape)
    amp = gain.amplitude_gain(omega)
    sm = 0.5 * (sx - 1j * sy)
    b_out = beta - np.sqrt(gamma_b) * sm
    rate = beta**2 + gamma_b * 0.5 * (1 + sz) - 2 * np.sqrt(gamma_b) * beta * 0.5 * sx
    return amp * b_out.real, amp * b_out.imag, gain.offset + amp**2 * rate


def rabi_amplitudes(omega, gain: GainModel, sz0: float, gamma_b: float) -> tuple[np.ndarray, np.ndarray]:
    """Oscillation amplitudes ``(A_I, A_power)`` of a resonantly driven, damped Rabi signal."""
    omega = np.asarray(omega, dtype=float)
    amp = gain.amplitude_gain(omega)
    a_i = amp * np.sqrt(gamma_b) * abs(sz0) / 2
    a_p = amp**2 * abs(sz0) * np.sqrt(gamma_b**2 + omega**2) / 2
    return a_i, a_p


@dataclass
class GainFit:
    model: GainModel
    inv_omega_inf: float
    residual_rms: float
    power_residual_rms: float


def calibrate_gain(samples, sz0: float, gamma_b: float, offset: float = 0.0) -> GainFit:
    """Least-squares fit of ``A_I(Omega) = a + b Omega`` giving ``sqrt(g0)`` and ``1/omega_inf``.

    ``samples`` is a list of ``(Omega, A_I, A_power)``.  The power amplitudes
    are not fitted; their RMS misfit under the fitted model is reported.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise InsufficientData("samples must be (Omega, A_I, A_power) triples")
    omega, a_i, a_p = data.T
    if np.unique(omega).size < 3:
        raise InsufficientData("need at least three distinct Rabi rates")
    if sz0 == 0:
        raise InsufficientData("sz0 = 0 carries no signal")
    design = np.column_stack([np.ones_like(omega), omega])
    coef, _, rank, _ = np.linalg.lstsq(design, a_i, rcond=None)
    if rank < 2:
        raise InsufficientData("singular gain fit")
    a, b = coef
    scale = np.sqrt(gamma_b) * abs(sz0) / 2
    sqrt_g0 = a / scale
    if sqrt_g0 <= 0:
        raise InsufficientData("fitted gain is not positive")
    inv_omega_inf = -b / a
    omega_inf = np.inf if inv_omega_inf <= 0 else 1.0 / inv_omega_inf
    model = GainModel(sqrt_g0**2, omega_inf, offset)
    resid = a_i - design @ coef
    try:
        _, pred_p = rabi_amplitudes(omega, model, sz0, gamma_b)
        p_rms = float(np.sqrt(np.mean((a_p - pred_p) ** 2)))
    except GainModelDomainError:
        p_rms = float("nan")
    return GainFit(model, float(inv_omega_inf), float(np.sqrt(np.mean(resid**2))), p_rms)
