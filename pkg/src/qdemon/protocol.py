"""Full demon cycles: preparation, encoding, extraction and memory reset.

A run evolves the joint equilibrium state through a sequence, books the
work, and keeps the joint state at each step boundary.  Thermal
preparations are probabilistic mixtures of an idle and a flipped branch,
weighted so the mixture has the Boltzmann population of the target
temperature.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import sequences as seqs
from .device import DeviceParams
from .dynamics import boltzmann_ratio, equilibrium_state, evolve
from .operators import partial_trace, tensor, thermal_state, von_neumann_entropy
from .thermo import WorkRecord, boltzmann_population, work

DT_OUT = 0.25e-9
# sequential cavity-drive area (linear-cavity units) at which the superposition
# scenario leaves S_D = 1.06 nats after extraction
DEMON_ALPHA = 2.7528

# continuous-sequence branches: start time -> nominal preparation
CONTINUOUS_PREPS = {"excited": 200e-9, "superposition": 300e-9, "equilibrium": 400e-9}
SEQUENTIAL_PREPS = {"ground": "none", "equilibrium": "none", "excited": "pi", "superposition": "pi_half", "three_pi_half": "three_pi_half"}


@dataclass
class StepStates:
    rho_1: np.ndarray  # prepared system, at the start of the work window
    rho_2: np.ndarray  # at the end of the encoding pulse
    rho_3: np.ndarray  # after extraction
    rho_4: np.ndarray  # after memory reset


@dataclass
class DemonRun:
    kind: str
    prep: str
    alpha_in: float
    states: StepStates
    record: WorkRecord
    n_trunc: int
    T_K: float | None = None
    branches: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    min_eigenvalue: float = 0.0
    max_trace_err: float = 0.0

    def qubit(self, step: int) -> np.ndarray:
        return partial_trace(getattr(self.states, f"rho_{step}"), "qubit", self.n_trunc)

    def cavity(self, step: int) -> np.ndarray:
        return partial_trace(getattr(self.states, f"rho_{step}"), "cavity", self.n_trunc)

    def p_e(self, step: int) -> float:
        return float(np.real(self.qubit(step)[1, 1]))

    def S_S(self, step: int) -> float:
        return von_neumann_entropy(self.qubit(step))

    def S_D(self, step: int = 3) -> float:
        return von_neumann_entropy(self.cavity(step))

    @property
    def work_hfs(self) -> float:
        return self.record.work_over_hfs

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "prep": self.prep,
            "alpha_in": self.alpha_in,
            "T_K": self.T_K,
            "work_hfs": self.record.work_over_hfs,
            "heat_hfs": self.record.heat_over_hfs,
            "net_heat_hfs": self.record.net_heat_over_hfs,
            "delta_U_hfs": self.record.delta_U_over_hfs,
            "balance_residual": self.record.balance_residual,
            "p_e": [self.p_e(k) for k in (1, 2, 3, 4)],
            "S_S": [self.S_S(k) for k in (1, 2, 3, 4)],
            "S_D3": self.S_D(3),
            "nbar2": float(np.real(np.trace(np.diag(np.arange(self.n_trunc + 1)) @ self.cavity(2)))),
        }


def time_grid(sequence, dt: float = DT_OUT) -> np.ndarray:
    """Uniform-ish grid of spacing <= ``dt`` containing every marker and pulse edge."""
    nodes = sorted({0.0, sequence.total_duration, *sequence.markers.values(), *sequence.breakpoints()})
    nodes = [x for x in nodes if 0.0 <= x <= sequence.total_duration]
    pieces = [np.array([nodes[0]])]
    for a, b in zip(nodes[:-1], nodes[1:]):
        if b - a <= 1e-15:
            continue
        k = max(1, int(np.ceil((b - a) / dt - 1e-9)))
        pieces.append(np.linspace(a, b, k + 1)[1:])
    return np.concatenate(pieces)


def ground_state(params: DeviceParams, n_trunc: int) -> np.ndarray:
    """Qubit in ``|g>`` (the T_S -> 0 limit), cavity at its equilibrium temperature."""
    cav = thermal_state(boltzmann_ratio(params.f_D, params.T_D0), n_trunc)
    return tensor(np.diag([1.0, 0.0]).astype(complex), cav)


def memory_reset(rho: np.ndarray, params: DeviceParams, n_trunc: int) -> np.ndarray:
    """Ideal memory thermalization: the cavity is replaced by its equilibrium state."""
    cav = thermal_state(boltzmann_ratio(params.f_D, params.T_D0), n_trunc)
    return tensor(partial_trace(rho, "qubit", n_trunc), cav)


def _run_single(sequence, params, n_trunc, *, kind, prep, alpha_in, tol, dt, fixed_step, reset_duration, rho0=None):
    rho0 = equilibrium_state(params, n_trunc) if rho0 is None else rho0
    t = time_grid(sequence, dt)
    m = sequence.markers
    store = (m["prepared"], m["encode_end"], m["extract_end"])
    traj = evolve(rho0, params, sequence, t, tol, n_trunc=n_trunc, fixed_step=fixed_step, store_times=store)
    rec = work(traj, params, sequence, init_label=prep)
    rho_3 = traj.state_at(m["extract_end"])
    if reset_duration > 0:
        free = seqs.free_evolution(reset_duration)
        rho_4 = evolve(rho_3, params, free, np.array([0.0, reset_duration]), tol, n_trunc=n_trunc, fixed_step=fixed_step).final_state
    else:
        rho_4 = memory_reset(rho_3, params, n_trunc)
    states = StepStates(traj.state_at(m["prepared"]), traj.state_at(m["encode_end"]), rho_3, rho_4)
    run = DemonRun(kind, prep, alpha_in, states, rec, n_trunc)
    run.min_eigenvalue = float(np.nanmin(traj.min_eigenvalues))
    run.max_trace_err = float(np.max(traj["trace_err"]))
    run.trajectory = traj
    run.sequence = sequence
    return run


def mix_runs(runs, weights, prep, T_K=None) -> DemonRun:
    """Probability mixture of branch runs (linearity of the master equation)."""
    w = np.asarray(weights, dtype=float)
    mix = lambda name: sum(wi * getattr(r.states, name) for wi, r in zip(w, runs))
    states = StepStates(mix("rho_1"), mix("rho_2"), mix("rho_3"), mix("rho_4"))
    rec = WorkRecord.combine([r.record for r in runs], w, init_label=prep, T_K=T_K)
    out = DemonRun(runs[0].kind, prep, runs[0].alpha_in, states, rec, runs[0].n_trunc, T_K, list(runs), list(w))
    out.min_eigenvalue = min(r.min_eigenvalue for r in runs)
    out.max_trace_err = max(r.max_trace_err for r in runs)
    return out


def _parse_prep(prep):
    """Return ``(label, T)``; ``T`` is None for non-thermal preparations."""
    if isinstance(prep, (int, float)):
        return f"T={prep:g}K", float(prep)
    if isinstance(prep, str) and prep.startswith("T="):
        v = prep[2:].rstrip("K")
        T = np.inf if v in ("inf", "infinity") else float(v)
        return prep, T
    return prep, None


class DemonSimulator:
    """Runs demon cycles for one parameter set, caching calibrations and branches."""

    def __init__(self, params: DeviceParams, n_trunc: int | None = None, *, tol: float = 1e-8, dt: float = DT_OUT,
                 fixed_step: float | None = None, reset_duration: float = 0.0, calibration: seqs.PulseCalibration | None = None):
        self.params = params
        self.n_trunc = params.n_trunc if n_trunc is None else n_trunc
        self.tol = tol
        self.dt = dt
        self.fixed_step = fixed_step
        self.reset_duration = reset_duration
        self._calibration = calibration
        self._cache = {}

    @property
    def calibration(self) -> seqs.PulseCalibration:
        if self._calibration is None:
            self._calibration = seqs.calibrate(self.params)
        return self._calibration

    def sequence(self, kind: str, prep: str, alpha_in: float):
        if kind == "sequential":
            return seqs.make_sequential_sequence(SEQUENTIAL_PREPS.get(prep, prep), alpha_in, self.params, self.calibration)
        if kind == "continuous":
            return seqs.make_continuous_sequence(CONTINUOUS_PREPS[prep], alpha_in, self.params)
        raise ValueError(f"unknown sequence kind {kind!r}")

    def branch(self, kind: str, prep: str, alpha_in: float) -> DemonRun:
        key = (kind, prep, float(alpha_in))
        if key not in self._cache:
            seq = self.sequence(kind, prep, alpha_in)
            rho0 = ground_state(self.params, self.n_trunc) if prep == "ground" else None
            self._cache[key] = _run_single(seq, self.params, self.n_trunc, kind=kind, prep=prep, alpha_in=alpha_in,
                                           tol=self.tol, dt=self.dt, fixed_step=self.fixed_step, reset_duration=self.reset_duration, rho0=rho0)
        return self._cache[key]

    def thermal_weight(self, kind: str, T: float) -> float:
        """Weight of the flipped branch so the prepared qubit has Boltzmann population at ``T``.

        Branch populations are taken from runs without encoding, so the weight
        is a property of the preparation alone.
        """
        idle = self.branch(kind, "equilibrium", 0.0).p_e(1)
        flip = self.branch(kind, "excited", 0.0).p_e(1)
        return seqs.mixture_weight(boltzmann_population(T, self.params.f_S), idle, flip)

    def run(self, kind: str, prep, alpha_in: float) -> DemonRun:
        label, T = _parse_prep(prep)
        if T is None:
            return self.branch(kind, label, alpha_in)
        p = self.thermal_weight(kind, T)
        runs = [self.branch(kind, "excited", alpha_in), self.branch(kind, "equilibrium", alpha_in)]
        return mix_runs(runs, [p, 1 - p], label, T)

    def maximally_mixed(self, kind: str, alpha_in: float) -> DemonRun:
        return self.run(kind, np.inf, alpha_in)
