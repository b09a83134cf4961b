"""Pulse envelopes, demon protocols, calibration and effective thermal preparation."""
from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import erf

from .constants import BOLTZMANN_K, PLANCK_H, TWO_PI
from .device import DeviceParams, DriveEnvelope
from .errors import CalibrationFailed, CalibrationRequired, ParameterError, TruncationUnsafe, UnreachableTemperature
from .operators import JointSpace, tensor

QUBIT_PORT = "qubit-port-b"
CAVITY_PORT = "cavity-port-a"

SEQ_SIGMA = 12.5e-9
CONT_SIGMA = 10e-9
CONT_RABI = TWO_PI / 416e-9  # rad/s
CONT_START_TIMES = (200e-9, 300e-9, 400e-9)
TOMO_PULSE_DURATION = 400e-9
TOMO_DISPLACEMENT_SIGMA = 2e-9

PREPS = {"none": 0.0, "pi_half": 0.5, "pi": 1.0, "three_pi_half": 1.5}


def gaussian_area(sigma: float) -> float:
    """Integral of a unit-peak Gaussian truncated at +/- 2 sigma."""
    return sigma * np.sqrt(2 * np.pi) * erf(np.sqrt(2))


@dataclass(frozen=True)
class PulseSegment:
    target: str
    shape: str
    start: float
    duration: float
    amplitude: complex
    carrier_detuning: float = 0.0
    sigma: float | None = None

    def __post_init__(self):
        if self.target not in (QUBIT_PORT, CAVITY_PORT):
            raise ParameterError(f"unknown target {self.target!r}")
        if self.shape not in ("gaussian", "square"):
            raise ParameterError(f"unknown shape {self.shape!r}")
        if not self.duration > 0:
            raise ParameterError("segment duration must be positive")
        if self.shape == "gaussian":
            if self.sigma is None or self.sigma <= 0:
                raise ParameterError("gaussian segments need sigma > 0")
            if abs(self.duration - 4 * self.sigma) > 1e-6 * self.duration:
                raise ParameterError("gaussian segments are truncated at +/- 2 sigma")

    @property
    def end(self) -> float:
        return self.start + self.duration

    @property
    def center(self) -> float:
        return self.start + self.duration / 2

    def envelope(self, t: float) -> float:
        if t < self.start or t > self.end:
            return 0.0
        if self.shape == "square":
            return 1.0
        x = (t - self.center) / self.sigma
        return float(np.exp(-0.5 * x * x))

    def value(self, t: float) -> complex:
        env = self.envelope(t)
        if env == 0.0:
            return 0j
        a = self.amplitude * env
        if self.carrier_detuning:
            a = a * np.exp(-1j * TWO_PI * self.carrier_detuning * t)
        return a

    def area(self) -> complex:
        unit = self.duration if self.shape == "square" else gaussian_area(self.sigma)
        return self.amplitude * unit

    def to_dict(self) -> dict:
        d = asdict(self)
        amp = complex(self.amplitude)
        d["amplitude"] = [amp.real, amp.imag]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PulseSegment":
        d = dict(d)
        amp = d.pop("amplitude")
        amp = complex(*amp) if isinstance(amp, (list, tuple)) else complex(amp)
        return cls(amplitude=amp, **d)


@dataclass
class PulseSequence:
    segments: list[PulseSegment]
    total_duration: float
    markers: dict[str, float] = field(default_factory=dict)
    kind: str = "custom"

    def qubit_coefficient(self, t: float) -> complex:
        # rotation about +y: sigma_x cos(phi) + sigma_y sin(phi) with phi = pi/2
        c = 0j
        for s in self._qubit:
            c += s.value(t)
        return -0.5j * c

    def cavity_amplitude(self, t: float) -> complex:
        c = 0j
        for s in self._cavity:
            c += s.value(t)
        return c

    @property
    def _qubit(self):
        return [s for s in self.segments if s.target == QUBIT_PORT]

    @property
    def _cavity(self):
        return [s for s in self.segments if s.target == CAVITY_PORT]

    def rabi_rate(self, t) -> np.ndarray:
        """Instantaneous qubit Rabi rate Omega(t) (rad/s) on an array of times."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([abs(sum(s.value(x) for s in self._qubit)) for x in t])

    def drive(self) -> DriveEnvelope:
        qubit, cavity = self._qubit, self._cavity

        def qc(t):
            c = 0j
            for s in qubit:
                c += s.value(t)
            return -0.5j * c

        def cc(t):
            c = 0j
            for s in cavity:
                c += s.value(t)
            return c

        return DriveEnvelope(cavity_amp=cc, qubit_coefficient=qc)

    def breakpoints(self) -> list[float]:
        pts = set()
        for s in self.segments:
            pts.update((s.start, s.end))
        return sorted(pts)

    def window(self, name: str = "extract") -> tuple[float, float]:
        return self.markers[f"{name}_start"], self.markers[f"{name}_end"]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "total_duration": self.total_duration,
            "markers": dict(self.markers),
            "segments": [s.to_dict() for s in self.segments],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "PulseSequence":
        return cls(
            segments=[PulseSegment.from_dict(s) for s in d["segments"]],
            total_duration=float(d["total_duration"]),
            markers={k: float(v) for k, v in d.get("markers", {}).items()},
            kind=d.get("kind", "custom"),
        )

    @classmethod
    def from_json(cls, text: str) -> "PulseSequence":
        return cls.from_dict(json.loads(text))


def free_evolution(duration: float) -> PulseSequence:
    return PulseSequence([], duration, {"start": 0.0, "end": duration}, kind="free")


def gaussian_segment(target, start, sigma, area, carrier_detuning=0.0) -> PulseSegment:
    """Gaussian on ``[start, start + 4 sigma]`` whose truncated integral equals ``area``."""
    return PulseSegment(target, "gaussian", start, 4 * sigma, area / gaussian_area(sigma), carrier_detuning, sigma)


@dataclass(frozen=True)
class PulseCalibration:
    """Qubit drive amplitudes (rad/s) producing a pi rotation."""

    gaussian_pi_amplitude: float
    sigma: float = SEQ_SIGMA

    def to_dict(self):
        return asdict(self)


def ideal_calibration(sigma: float = SEQ_SIGMA) -> PulseCalibration:
    """Area-theorem amplitude, exact without decoherence or detuning."""
    return PulseCalibration(np.pi / gaussian_area(sigma), sigma)


def make_sequential_sequence(prep: str, alpha_in: float, params: DeviceParams, calibration: PulseCalibration | None = None) -> PulseSequence:
    """Three back-to-back 50 ns Gaussian windows: preparation, encoding, extraction."""
    if calibration is None:
        raise CalibrationRequired("sequential sequence needs a PulseCalibration (see calibrate_pi_amplitude)")
    if prep not in PREPS:
        raise ParameterError(f"prep must be one of {sorted(PREPS)}, got {prep!r}")
    if alpha_in < 0:
        raise ParameterError("alpha_in must be >= 0")
    sigma = calibration.sigma
    w = 4 * sigma
    amp = calibration.gaussian_pi_amplitude
    segs = []
    if PREPS[prep]:
        segs.append(PulseSegment(QUBIT_PORT, "gaussian", 0.0, w, amp * PREPS[prep], 0.0, sigma))
    if alpha_in > 0:
        segs.append(gaussian_segment(CAVITY_PORT, w, sigma, alpha_in))
    segs.append(PulseSegment(QUBIT_PORT, "gaussian", 2 * w, w, amp, 0.0, sigma))
    markers = {
        "prep_start": 0.0, "prep_end": w, "prepared": w,
        "encode_start": w, "encode_end": 2 * w,
        "extract_start": 2 * w, "extract_end": 3 * w,
    }
    return PulseSequence(segs, 3 * w, markers, kind="sequential")


def make_continuous_sequence(start_time: float, alpha_in: float, params: DeviceParams, rabi: float = CONT_RABI) -> PulseSequence:
    """One square Rabi drive; the cavity displacement is centred on ``start_time``.

    Work is booked from ``start_time`` over ``pi / rabi``.
    """
    if not any(abs(start_time - s) < 1e-12 for s in CONT_START_TIMES):
        raise ParameterError(f"start_time must be one of 200, 300, 400 ns, got {start_time!r}")
    if alpha_in < 0:
        raise ParameterError("alpha_in must be >= 0")
    t_pi = np.pi / rabi
    end = start_time + t_pi
    segs = [PulseSegment(QUBIT_PORT, "square", 0.0, end, rabi)]
    if alpha_in > 0:
        segs.append(gaussian_segment(CAVITY_PORT, start_time - 2 * CONT_SIGMA, CONT_SIGMA, alpha_in))
    markers = {
        "prep_start": 0.0, "prep_end": start_time - 2 * CONT_SIGMA, "prepared": start_time,
        "encode_start": start_time - 2 * CONT_SIGMA, "encode_end": start_time + 2 * CONT_SIGMA,
        "extract_start": start_time, "extract_end": end,
    }
    return PulseSequence(segs, end, markers, kind="continuous")


def conditional_pi_detuning(params: DeviceParams, n: int) -> float:
    """Carrier offset (Hz) of the qubit line when the cavity holds ``n`` photons."""
    return -n * params.chi + n * n * params.chi2


def make_tomography_sequence(n: int, beta: complex, params: DeviceParams, pulse_duration: float = TOMO_PULSE_DURATION, displacement_sigma: float = TOMO_DISPLACEMENT_SIGMA) -> PulseSequence:
    """Displace the cavity by ``-beta``, then a number-selective pi pulse on Fock ``n``."""
    segs = []
    t0 = 0.0
    if beta != 0:
        # displacement by -beta: coefficient of d^+ integrates to i * (-beta)
        segs.append(gaussian_segment(CAVITY_PORT, 0.0, displacement_sigma, -1j * beta))
        t0 = 4 * displacement_sigma
    sigma = pulse_duration / 4
    segs.append(gaussian_segment(QUBIT_PORT, t0, sigma, np.pi, conditional_pi_detuning(params, n)))
    markers = {"displace_start": 0.0, "displace_end": t0, "probe_start": t0, "probe_end": t0 + pulse_duration}
    return PulseSequence(segs, t0 + pulse_duration, markers, kind="tomography")


def thermal_prep_probability(T_target: float, T0: float, F_pi: float, f_S: float) -> float:
    """Fraction of runs receiving a pi pulse so the qubit ends at Boltzmann weight ``T_target``."""
    if T0 <= 0:
        raise ParameterError("T0 must be positive")
    if T_target < T0:
        raise UnreachableTemperature(f"T_target={T_target} K is below the equilibrium T0={T0} K")
    x0 = PLANCK_H * f_S / (BOLTZMANN_K * T0)
    x = 0.0 if np.isinf(T_target) else PLANCK_H * f_S / (BOLTZMANN_K * T_target)
    p = ((1 + np.exp(x0)) / (1 + np.exp(x)) - 1) / (F_pi * np.expm1(x0))
    if not 0 <= p <= 1:
        warnings.warn(f"prep probability {p:.4f} outside [0, 1]; clamped", stacklevel=2)
        p = float(np.clip(p, 0, 1))
    return float(p)


def mixture_weight(p_target: float, p_idle: float, p_flipped: float) -> float:
    """Weight of the flipped branch so the mixture has excited population ``p_target``.

    Generalises ``thermal_prep_probability`` to branch populations taken from
    simulation instead of the closed-form pi-pulse fidelity model.
    """
    if p_flipped == p_idle:
        raise ParameterError("branches have identical populations")
    p = (p_target - p_idle) / (p_flipped - p_idle)
    if not -1e-12 <= p <= 1 + 1e-12:
        raise UnreachableTemperature(f"target population {p_target:.4f} not reachable from branches ({p_idle:.4f}, {p_flipped:.4f})")
    return float(np.clip(p, 0, 1))


def _ground_vacuum(n_trunc: int) -> np.ndarray:
    sp = JointSpace(n_trunc)
    v = sp.basis(0, 0)
    return np.outer(v, v.conj())


def calibrate_pi_amplitude(params: DeviceParams, pulse_shape: str = "gaussian", *, sigma: float = SEQ_SIGMA, duration: float | None = None, n_trunc: int = 3, tol: float = 1e-9) -> float:
    """Amplitude (rad/s) maximising the excited population after one pulse from ``|g,0>``.

    ``pulse_shape`` is ``"gaussian"`` (peak amplitude, +/- 2 sigma) or
    ``"square"`` (constant Rabi rate over ``duration``).
    """
    from .dynamics import evolve

    if pulse_shape == "gaussian":
        length = 4 * sigma
        guess = np.pi / gaussian_area(sigma)
    elif pulse_shape == "square":
        if duration is None:
            raise ParameterError("square calibration needs a duration")
        length = duration
        guess = np.pi / duration
    else:
        raise ParameterError(f"unknown pulse shape {pulse_shape!r}")
    rho0 = _ground_vacuum(n_trunc)
    t_grid = np.array([0.0, length])

    def excited(amp):
        if pulse_shape == "gaussian":
            seg = PulseSegment(QUBIT_PORT, "gaussian", 0.0, length, amp, 0.0, sigma)
        else:
            seg = PulseSegment(QUBIT_PORT, "square", 0.0, length, amp)
        traj = evolve(rho0, params, PulseSequence([seg], length), t_grid, tol=tol, check_positivity=False)
        return 0.5 * (1 + traj["sz"][-1])

    # coarse sweep, then a bounded refinement around the best point
    amps = guess * np.linspace(0.5, 1.5, 21)
    pops = [excited(a) for a in amps]
    i = int(np.argmax(pops))
    lo, hi = amps[max(i - 1, 0)], amps[min(i + 1, len(amps) - 1)]
    res = minimize_scalar(lambda a: -excited(a), bounds=(lo, hi), method="bounded", options={"xatol": guess * 1e-7})
    best = -res.fun
    if best < 0.9:
        raise CalibrationFailed(f"best pi-pulse population {best:.3f} < 0.9")
    return float(res.x)


def calibrate(params: DeviceParams, sigma: float = SEQ_SIGMA) -> PulseCalibration:
    return PulseCalibration(calibrate_pi_amplitude(params, "gaussian", sigma=sigma), sigma)


def encoding_sequence(alpha_in: float, kind: str = "sequential") -> PulseSequence:
    """Cavity displacement pulse alone (step 2), starting at t = 0."""
    sigma = SEQ_SIGMA if kind == "sequential" else CONT_SIGMA
    segs = [gaussian_segment(CAVITY_PORT, 0.0, sigma, alpha_in)] if alpha_in > 0 else []
    return PulseSequence(segs, 4 * sigma, {"encode_start": 0.0, "encode_end": 4 * sigma}, kind="encode")


def encoded_state(alpha_in: float, params: DeviceParams, n_trunc: int | None = None, kind: str = "sequential", tol: float = 1e-8) -> np.ndarray:
    """Joint state after step 2 from ``|g> (x)`` thermal cavity."""
    from .dynamics import boltzmann_ratio, evolve, thermal_qubit
    from .operators import thermal_state

    n_trunc = params.n_trunc if n_trunc is None else n_trunc
    rho0 = tensor(thermal_qubit(0.0), thermal_state(boltzmann_ratio(params.f_D, params.T_D0), n_trunc))
    seq = encoding_sequence(alpha_in, kind)
    traj = evolve(rho0, params, seq, np.array([0.0, seq.total_duration]), tol=tol, check_positivity=False)
    return traj.final_state


TAIL_LIMIT = 1e-3  # largest tolerated population of the top Fock level


def _encoded_nbar(alpha_in, params, n_trunc, kind, tail=False):
    rho = encoded_state(alpha_in, params, n_trunc, kind)
    nf = n_trunc + 1
    pn = np.real(np.diagonal(rho)).reshape(2, nf).sum(axis=0)
    nbar = float(np.arange(nf) @ pn)
    return (nbar, float(pn[-1])) if tail else nbar


def alpha_to_nbar(alpha_in: float, params: DeviceParams, n_trunc: int | None = None, kind: str = "sequential") -> float:
    """Mean photon number at the end of the encoding pulse with the qubit in ``|g>``."""
    if alpha_in < 0:
        raise ParameterError("alpha_in must be >= 0")
    n_trunc = params.n_trunc if n_trunc is None else n_trunc
    nbar, top = _encoded_nbar(alpha_in, params, n_trunc, kind, tail=True)
    if nbar > n_trunc / 2:
        raise TruncationUnsafe(f"nbar={nbar:.2f} exceeds n_trunc/2={n_trunc / 2}")
    # a small space can keep nbar low while piling weight on the top level
    if top > TAIL_LIMIT:
        raise TruncationUnsafe(f"top Fock level holds {top:.2e} of the population")
    return nbar


def nbar_to_alpha(nbar: float, params: DeviceParams, n_trunc: int | None = None, kind: str = "sequential", alpha_max: float = 6.0) -> float:
    """Invert ``alpha_to_nbar`` by root bracketing on ``[0, alpha_max]``."""
    n_trunc = params.n_trunc if n_trunc is None else n_trunc
    if nbar > n_trunc / 2:
        raise TruncationUnsafe(f"nbar={nbar:.2f} exceeds n_trunc/2={n_trunc / 2}")
    # the bracket end may overfill the space; only the root has to be safe
    a = float(brentq(lambda a: _encoded_nbar(a, params, n_trunc, kind) - nbar, 0.0, alpha_max, xtol=1e-6))
    alpha_to_nbar(a, params, n_trunc, kind)
    return a
