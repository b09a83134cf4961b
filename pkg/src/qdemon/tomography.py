"""Generalized Husimi-Q tomography of the cavity memory and MaxLike reconstruction.

A record ``p_e[n, beta]`` is the excited-qubit probability after displacing
the cavity by ``-beta`` and applying a long pi pulse resonant with the qubit
line of Fock state ``n``.  Its POVM element is obtained by propagating
``I (x) |e><e|`` backwards through that sequence.

The default ``factorized`` mode treats the displacement as instantaneous:
``E_{n,beta} = D(beta) F_n D(beta)^+`` where ``F_n`` is the backward image of
the probe pulse alone.  ``F_n`` is block diagonal in the photon number (one
2x2 qubit block per Fock level), so it is cheap to compute on a large
cutoff.  ``full`` mode propagates the whole time-dependent sequence on the
joint space and is meant for small spaces and cross-checks.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .device import DeviceParams, diagonal_energies
from .dynamics import evolve_adjoint
from .errors import ParameterError, ShapeError, TruncationUnsafe
from .integrate import integrate
from .operators import partial_trace, project_to_density_matrix, von_neumann_entropy
from .sequences import TOMO_PULSE_DURATION, make_tomography_sequence

G, E = 0, 1


@dataclass
class TomographyGrid:
    """Displacements ``beta`` (flat complex array), probed Fock levels and records ``p_e[n, beta]``."""

    beta: np.ndarray
    fock: np.ndarray
    p_e: np.ndarray | None = None

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=complex).ravel()
        self.fock = np.asarray(self.fock, dtype=int).ravel()
        if self.p_e is not None:
            self.p_e = np.asarray(self.p_e, dtype=float)
            if self.p_e.shape != (self.fock.size, self.beta.size):
                raise ShapeError(f"p_e must have shape {(self.fock.size, self.beta.size)}, got {self.p_e.shape}")

    @classmethod
    def square(cls, n_side: int = 31, extent: float = 5.95, n_max: int = 5) -> "TomographyGrid":
        x = np.linspace(-extent, extent, n_side)
        re, im = np.meshgrid(x, x, indexing="xy")
        return cls((re + 1j * im).ravel(), np.arange(n_max + 1))

    @classmethod
    def desk(cls) -> "TomographyGrid":
        return cls.square(15, 5.95, 3)

    def with_records(self, p_e) -> "TomographyGrid":
        return TomographyGrid(self.beta.copy(), self.fock.copy(), p_e)

    def subset(self, mask) -> "TomographyGrid":
        mask = np.asarray(mask, dtype=bool)
        return TomographyGrid(self.beta[mask], self.fock.copy(), None if self.p_e is None else self.p_e[:, mask])

    def mask(self, beta_max: float | None) -> np.ndarray:
        if beta_max is None:
            return np.ones(self.beta.size, dtype=bool)
        return np.abs(self.beta) <= beta_max + 1e-12

    def to_records(self) -> list[dict]:
        if self.p_e is None:
            raise ParameterError("grid has no records")
        return [
            {"beta_re": float(b.real), "beta_im": float(b.imag), "n": int(n), "p_e": float(self.p_e[i, j])}
            for i, n in enumerate(self.fock)
            for j, b in enumerate(self.beta)
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_records())

    @classmethod
    def from_records(cls, records) -> "TomographyGrid":
        betas, focks = [], []
        for r in records:
            b = complex(r["beta_re"], r["beta_im"])
            if b not in betas:
                betas.append(b)
            if int(r["n"]) not in focks:
                focks.append(int(r["n"]))
        p = np.full((len(focks), len(betas)), np.nan)
        bi = {b: j for j, b in enumerate(betas)}
        fi = {n: i for i, n in enumerate(focks)}
        for r in records:
            p[fi[int(r["n"])], bi[complex(r["beta_re"], r["beta_im"])]] = r["p_e"]
        if np.isnan(p).any():
            raise ParameterError("record list does not cover the full (n, beta) grid")
        return cls(np.array(betas), np.array(focks), p)

    @classmethod
    def from_json(cls, text: str) -> "TomographyGrid":
        return cls.from_records(json.loads(text))


@dataclass
class ReconstructionConfig:
    n_trunc_recon: int = 15
    beta_max: float | None = 3.0
    p_g: float = 0.97
    step_size: float | None = None
    max_iters: int = 20000
    convergence_tol: float = 1e-12

    def __post_init__(self):
        if not 0 <= self.p_g <= 1:
            raise ParameterError("p_g must lie in [0, 1]")
        if self.n_trunc_recon < 1:
            raise ParameterError("n_trunc_recon must be >= 1")
        if not 13 <= self.n_trunc_recon <= 21:
            warnings.warn(f"n_trunc_recon={self.n_trunc_recon} lies outside the 13..21 plateau", stacklevel=2)

    def replace(self, **kw) -> "ReconstructionConfig":
        d = asdict(self)
        d.update(kw)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return ReconstructionConfig(**d)


@dataclass
class ProbeConfig:
    """Number-selective probe: Gaussian pi pulse of ``duration`` (sigma = duration / 4)."""

    duration: float = TOMO_PULSE_DURATION
    adjoint_includes_excitation: bool = False
    tol: float = 1e-9
    mode: str = "factorized"  # factorized | ideal | full


# ---------------------------------------------------------------- Husimi functions

def displacement_block(beta: complex, rows: int, cols: int) -> np.ndarray:
    """Rows ``0..rows-1`` and columns ``0..cols-1`` of the untruncated ``D(beta)``.

    Closed Laguerre form, evaluated with log-scaled prefactors so large
    ``|beta|`` and large columns stay accurate to machine precision.
    """
    m = np.arange(rows)[:, None]
    k = np.arange(cols)[None, :]
    if beta == 0:
        return (m == k).astype(complex)
    lo, hi = np.minimum(m, k), np.maximum(m, k)
    d = hi - lo
    x = abs(beta) ** 2
    mag = np.exp(0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) + d * np.log(abs(beta)) - x / 2)
    ph = np.angle(beta)
    # <m|D|k> carries beta^(m-k) below the diagonal and (-beta*)^(k-m) above it
    phase = np.where(m >= k, np.exp(1j * d * ph), (-1.0) ** d * np.exp(-1j * d * ph))
    return mag * eval_genlaguerre(lo, d, x) * phase


def husimi_q(rho_D: np.ndarray, n: int, beta: complex, margin: int = 6) -> float:
    """``(1/pi) <n| D(beta)^+ rho D(beta) |n>`` on the untruncated displacement."""
    rho_D = np.asarray(rho_D)
    dim = rho_D.shape[0]
    n_trunc = dim - 1
    if n > n_trunc - abs(beta) ** 2 - margin:
        tail = float(np.real(rho_D[-1, -1]))
        warnings.warn(
            f"Q_{n}({beta:.3g}) probes beyond the truncation (n_trunc={n_trunc}); "
            f"error bounded by the weight outside the space, last-level population {tail:.2e}",
            stacklevel=2,
        )
    col = displacement_block(beta, dim, n + 1)[:, n]
    return float(np.real(col.conj() @ rho_D @ col)) / np.pi


# ---------------------------------------------------------------- probe effects

def _probe_rhs(params: DeviceParams, n: int, n_max: int, probe: ProbeConfig):
    seq = make_tomography_sequence(n, 0.0, params, probe.duration)
    coeff = seq.drive().coefficients
    h = diagonal_energies(params, n_max)
    wg, we = h[: n_max + 1], h[n_max + 1:]
    k = np.arange(n_max + 1, dtype=float)
    kappa = params.kappa_rate
    if probe.adjoint_includes_excitation:
        g_down, g_up = params.gamma_down, params.gamma_up
    else:
        g_down, g_up = params.gamma_1, 0.0
    g_phi = params.gamma_phi / 2
    dw = (wg - we)[:, None]  # phase rate of the (g, e) element under i[H0, E]

    def rhs(t, y):
        cq, _ = coeff(t)
        out = np.empty_like(y)
        gg, ge, eg, ee = y[:, G, G], y[:, G, E], y[:, E, G], y[:, E, E]
        # i [H, E] with H = H0 + cq |e><g| + cq* |g><e|
        out[:, G, G] = 1j * (np.conj(cq) * eg - cq * ge)
        out[:, E, E] = 1j * (cq * ge - np.conj(cq) * eg)
        out[:, G, E] = 1j * (dw[:, 0] * ge + np.conj(cq) * (ee - gg))
        out[:, E, G] = 1j * (-dw[:, 0] * eg + cq * (gg - ee))
        # qubit jumps
        out[:, E, E] += g_down * (gg - ee)
        out[:, G, G] += g_up * (ee - gg)
        half = 0.5 * (g_down + g_up) + 2 * g_phi
        out[:, G, E] -= half * ge
        out[:, E, G] -= half * eg
        # cavity decay couples level k to k-1
        if kappa:
            lower = np.zeros_like(y)
            lower[1:] = y[:-1]
            out += kappa * k[:, None, None] * (lower - y)
        return out

    return rhs, seq.total_duration


_PROBE_CACHE: dict = {}


def probe_effect(params: DeviceParams, n: int, n_max: int, probe: ProbeConfig | None = None) -> np.ndarray:
    """Backward image of ``I (x) |e><e|`` through the Fock-``n`` probe pulse.

    Returned as blocks ``F[k, q, q']`` for cavity levels ``k = 0..n_max``.
    Cavity decay only feeds level ``k`` from ``k - 1``, so a block never
    depends on higher levels and results on a larger cutoff are reused.
    """
    probe = probe or ProbeConfig()
    if probe.mode == "ideal":
        f = np.zeros((n_max + 1, 2, 2), dtype=complex)
        f[:, E, E] = 1.0
        if n <= n_max:
            f[n] = np.diag([1.0, 0.0])
        return f
    key = (params, int(n), probe.duration, probe.adjoint_includes_excitation, probe.tol)
    cached = _PROBE_CACHE.get(key)
    if cached is not None and cached.shape[0] > n_max:
        return cached[: n_max + 1].copy()
    rhs, T = _probe_rhs(params, n, n_max, probe)
    y0 = np.zeros((n_max + 1, 2, 2), dtype=complex)
    y0[:, E, E] = 1.0
    y, _ = integrate(lambda t, y: -rhs(t, y), y0, np.array([T, 0.0]), rtol=probe.tol, atol=probe.tol)
    y = 0.5 * (y + np.conj(np.swapaxes(y, 1, 2)))
    _PROBE_CACHE[key] = y
    return y.copy()


def probe_cutoff(n_rows: int, beta_abs: float) -> int:
    """Cavity levels the probe effect must cover so that displaced rows ``< n_rows`` are exact."""
    s = np.sqrt(n_rows) + beta_abs
    return int(np.ceil(s * s + 7 * s + 12))


def _beta_key(b) -> tuple:
    return (round(float(np.real(b)), 12), round(float(np.imag(b)), 12))


class EffectSet:
    """POVM elements ``E_{n,beta} = D(beta) F_n D(beta)^+`` for the grid points with ``|beta| <= beta_max``.

    ``n_rows`` is the largest cavity space the effects are restricted to.
    Methods take displacement values, so any sub-grid of the covered points
    can be simulated or reconstructed.
    """

    def __init__(self, grid: TomographyGrid, params: DeviceParams, n_rows: int, probe: ProbeConfig | None = None, beta_max: float | None = None):
        self.params = params
        self.probe = probe or ProbeConfig()
        self.n_rows = n_rows
        self.grid = grid.subset(grid.mask(beta_max))
        self.beta_max = float(np.max(np.abs(self.grid.beta))) if self.grid.beta.size else 0.0
        self.n_max = probe_cutoff(n_rows, self.beta_max)
        self.F = {int(n): probe_effect(params, int(n), self.n_max, self.probe) for n in grid.fock}
        self._disp = {}

    def _check(self, betas, focks):
        if np.any(np.abs(betas) > self.beta_max + 1e-9):
            raise TruncationUnsafe(f"displacement beyond the covered |beta| <= {self.beta_max:.3g}")
        missing = set(int(n) for n in focks) - set(self.F)
        if missing:
            raise ParameterError(f"no probe effect for Fock levels {sorted(missing)}")

    def disp(self, beta: complex) -> np.ndarray:
        key = _beta_key(beta)
        if key not in self._disp:
            self._disp[key] = displacement_block(complex(beta), self.n_rows, self.n_max + 1)
        return self._disp[key]

    def joint_effect(self, n: int, beta: complex, n_trunc: int) -> np.ndarray:
        """``E_{n,beta}`` restricted to the joint space with cutoff ``n_trunc``."""
        if n_trunc + 1 > self.n_rows:
            raise TruncationUnsafe("effect set was built for a smaller space")
        self._check(np.array([beta]), [n])
        A = self.disp(beta)[: n_trunc + 1]
        F = self.F[int(n)]
        nf = n_trunc + 1
        out = np.zeros((2 * nf, 2 * nf), dtype=complex)
        for q in (G, E):
            for r in (G, E):
                out[q * nf:(q + 1) * nf, r * nf:(r + 1) * nf] = (A * F[:, q, r]) @ A.conj().T
        return out

    def probabilities(self, rho_joint: np.ndarray, betas=None, focks=None) -> np.ndarray:
        """``p_e[n, beta] = Tr(rho E_{n,beta})``, shape ``(len(focks), len(betas))``."""
        betas = self.grid.beta if betas is None else np.asarray(betas, dtype=complex)
        focks = self.grid.fock if focks is None else np.asarray(focks, dtype=int)
        self._check(betas, focks)
        nf = rho_joint.shape[0] // 2
        if nf > self.n_rows:
            raise TruncationUnsafe("state lives on a larger space than the effect set")
        r4 = np.asarray(rho_joint).reshape(2, nf, 2, nf)
        out = np.empty((focks.size, betas.size))
        for col, b in enumerate(betas):
            A = self.disp(b)[:nf]
            # diag(A^+ rho_{q r} A) for the four qubit blocks
            diag = np.einsum("ik,qirj,jk->rqk", A.conj(), r4, A, optimize=True)
            for i, n in enumerate(focks):
                # Tr(rho E) = sum_k sum_qr rho'_{qr,kk} F_k[r, q]
                out[i, col] = np.real(np.einsum("krq,rqk->", self.F[int(n)], diag))
        return out

    def cavity_effects(self, n_recon: int, p_g: float, betas=None, focks=None) -> np.ndarray:
        """``G = Tr_S[(rho_S (x) I) E]`` for a diagonal qubit state; shape ``(n, beta, R, R)``."""
        if n_recon + 1 > self.n_rows:
            raise TruncationUnsafe("effect set was built for a smaller space")
        betas = self.grid.beta if betas is None else np.asarray(betas, dtype=complex)
        focks = self.grid.fock if focks is None else np.asarray(focks, dtype=int)
        self._check(betas, focks)
        out = np.empty((focks.size, betas.size, n_recon + 1, n_recon + 1), dtype=complex)
        for col, b in enumerate(betas):
            A = self.disp(b)[: n_recon + 1]
            for i, n in enumerate(focks):
                F = self.F[int(n)]
                w = p_g * F[:, G, G].real + (1 - p_g) * F[:, E, E].real
                out[i, col] = (A * w) @ A.conj().T
        return out


class FullEffectSet:
    """Effects propagated through the whole time-dependent sequence on the joint space."""

    def __init__(self, grid: TomographyGrid, params: DeviceParams, n_trunc: int, probe: ProbeConfig | None = None,
                 beta_max: float | None = None, displacement_sigma: float = 2e-9):
        self.params = params
        self.probe = probe or ProbeConfig(mode="full")
        self.n_rows = n_trunc + 1
        self.grid = grid.subset(grid.mask(beta_max))
        nf = n_trunc + 1
        e_final = np.zeros((2 * nf, 2 * nf), dtype=complex)
        e_final[nf:, nf:] = np.eye(nf)
        self.E = {}
        for b in self.grid.beta:
            for n in self.grid.fock:
                seq = make_tomography_sequence(int(n), b, params, self.probe.duration, displacement_sigma)
                t = np.array([0.0, seq.total_duration])
                self.E[int(n), _beta_key(b)] = evolve_adjoint(
                    e_final, params, seq, t, self.probe.tol, n_trunc=n_trunc,
                    adjoint_includes_excitation=self.probe.adjoint_includes_excitation).matrix

    def _get(self, n, b):
        try:
            return self.E[int(n), _beta_key(b)]
        except KeyError:
            raise ParameterError(f"no effect computed for n={n}, beta={complex(b):.3g}") from None

    def joint_effect(self, n: int, beta: complex, n_trunc: int) -> np.ndarray:
        if n_trunc + 1 != self.n_rows:
            raise TruncationUnsafe("full effects exist only on the space they were built for")
        return self._get(n, beta)

    def probabilities(self, rho_joint: np.ndarray, betas=None, focks=None) -> np.ndarray:
        betas = self.grid.beta if betas is None else np.asarray(betas, dtype=complex)
        focks = self.grid.fock if focks is None else np.asarray(focks, dtype=int)
        out = np.empty((focks.size, betas.size))
        for col, b in enumerate(betas):
            for i, n in enumerate(focks):
                out[i, col] = np.real(np.sum(self._get(n, b).T * rho_joint))
        return out

    def cavity_effects(self, n_recon: int, p_g: float, betas=None, focks=None) -> np.ndarray:
        nf = self.n_rows
        R = n_recon + 1
        if R > nf:
            raise TruncationUnsafe("effect set was built for a smaller space")
        betas = self.grid.beta if betas is None else np.asarray(betas, dtype=complex)
        focks = self.grid.fock if focks is None else np.asarray(focks, dtype=int)
        out = np.empty((focks.size, betas.size, R, R), dtype=complex)
        for col, b in enumerate(betas):
            for i, n in enumerate(focks):
                m = self._get(n, b)
                out[i, col] = p_g * m[:R, :R] + (1 - p_g) * m[nf:nf + R, nf:nf + R]
        return out


def build_effects(grid: TomographyGrid, params: DeviceParams, config: ReconstructionConfig | None = None, *,
                  n_rows: int | None = None, probe: ProbeConfig | None = None):
    """Effect set for the grid points with ``|beta| <= config.beta_max``, on cavity spaces up to ``n_rows`` levels.

    ``probe.mode`` selects ``factorized`` (default), ``ideal`` (instantaneous,
    dissipation-free pulses) or ``full`` (whole sequence on the joint space,
    ``n_rows - 1`` photons).
    """
    config = config or ReconstructionConfig()
    probe = probe or ProbeConfig()
    n_rows = config.n_trunc_recon + 1 if n_rows is None else n_rows
    if probe.mode == "full":
        return FullEffectSet(grid, params, n_rows - 1, probe, config.beta_max)
    if probe.mode not in ("factorized", "ideal"):
        raise ParameterError(f"unknown probe mode {probe.mode!r}")
    return EffectSet(grid, params, n_rows, probe, config.beta_max)


def simulate_tomography(rho_joint: np.ndarray, effects, grid: TomographyGrid | None = None) -> TomographyGrid:
    """Noiseless records ``p_e[n, beta]`` of a joint state on ``grid`` (default: every covered point)."""
    grid = effects.grid if grid is None else grid
    p = effects.probabilities(rho_joint, grid.beta, grid.fock)
    return grid.with_records(np.clip(p, 0.0, 1.0))


# ---------------------------------------------------------------- MaxLike

@dataclass
class Reconstruction:
    rho: np.ndarray
    log_likelihood: list = field(default_factory=list)
    entropy: float = 0.0
    converged: bool = False
    iterations: int = 0
    residual_rms: float = 0.0
    gradient_norm: float = 0.0
    config: ReconstructionConfig | None = None

    def to_dict(self) -> dict:
        return {
            "rho_real": self.rho.real.tolist(),
            "rho_imag": self.rho.imag.tolist(),
            "S_D": self.entropy,
            "converged": self.converged,
            "iterations": self.iterations,
            "residual_rms": self.residual_rms,
            "config": asdict(self.config) if self.config else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Reconstruction":
        d = json.loads(text)
        rho = np.array(d["rho_real"]) + 1j * np.array(d["rho_imag"])
        return cls(rho, [], d["S_D"], d["converged"], d["iterations"], d["residual_rms"])


def maxlike_reconstruct(grid: TomographyGrid, effects, config: ReconstructionConfig | None = None, *, rho0=None) -> Reconstruction:
    """Maximize ``f(rho) = -sum (p_e - Tr(rho G))^2`` over density matrices.

    Monotone accelerated projected gradient with backtracking: every accepted
    iterate has ``f`` at least as large as the previous one.
    """
    config = config or ReconstructionConfig()
    if grid.p_e is None:
        raise ParameterError("grid has no records")
    mask = grid.mask(config.beta_max)
    g_ops = effects.cavity_effects(config.n_trunc_recon, config.p_g, grid.beta[mask], grid.fock)
    d = config.n_trunc_recon + 1
    # Tr(rho G) = sum_ij rho_ij G_ji = vec(G^T) . vec(rho)
    A = np.swapaxes(g_ops, -1, -2).reshape(-1, d * d)
    p = grid.p_e[:, mask].ravel()

    def predict(rho):
        return np.real(A @ rho.ravel())

    def f_and_grad(rho):
        r = p - predict(rho)
        grad = 2 * (r @ A.conj()).reshape(d, d)  # ascent direction, Hermitian
        grad = 0.5 * (grad + grad.conj().T)
        return -float(r @ r), grad

    if config.step_size is not None:
        L = 1.0 / config.step_size
    else:
        # Lipschitz constant of the gradient: 2 * largest singular value squared of A
        L = 2 * np.linalg.norm(A, 2) ** 2
    rho = np.eye(d, dtype=complex) / d if rho0 is None else np.asarray(rho0, dtype=complex)
    f, _ = f_and_grad(rho)
    history = [f]
    y, t_k = rho.copy(), 1.0
    converged = False
    it = 0
    f_check = f

    def grad_map_norm(rho):
        _, g = f_and_grad(rho)
        return float(L * np.linalg.norm(project_to_density_matrix(rho + g / L) - rho))

    for it in range(1, config.max_iters + 1):
        fy, gy = f_and_grad(y)
        while True:
            z = project_to_density_matrix(y + gy / L)
            fz, _ = f_and_grad(z)
            diff = z - y
            # sufficient-increase test for the quadratic model
            if fz >= fy + np.real(np.vdot(gy, diff)) - 0.5 * L * np.real(np.vdot(diff, diff)) - 1e-15 * max(1.0, abs(fy)):
                break
            L *= 2
        if fz >= f:
            t_next = 0.5 * (1 + np.sqrt(1 + 4 * t_k * t_k))
            y = z + ((t_k - 1) / t_next) * (z - rho)
            rho, f, t_k = z, fz, t_next
        else:
            # restart the momentum from the last accepted iterate
            y, t_k = rho.copy(), 1.0
        history.append(f)
        if it % 25 == 0:
            gm = grad_map_norm(rho)
            if gm <= 10 * config.convergence_tol:
                converged = True
                break
            if f - f_check <= 0.0:
                break  # no progress at machine precision
            f_check = f
    gm = grad_map_norm(rho)
    converged = converged or gm <= 10 * config.convergence_tol
    rho = 0.5 * (rho + rho.conj().T)
    resid = p - predict(rho)
    return Reconstruction(
        rho=rho,
        log_likelihood=history,
        entropy=von_neumann_entropy(rho),
        converged=converged,
        iterations=it,
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        gradient_norm=gm,
        config=config,
    )


def entropy_sensitivity_sweep(grid: TomographyGrid, effects, base: ReconstructionConfig, over: dict) -> dict:
    """Reconstructed ``S_D`` while sweeping one config field at a time.

    ``over`` maps a field name (``n_trunc_recon``, ``beta_max`` or ``p_g``) to
    its values.  Each entry reports the values, entropies and their spread.
    """
    table = {}
    for name, values in over.items():
        if name not in ("n_trunc_recon", "beta_max", "p_g"):
            raise ParameterError(f"cannot sweep {name!r}")
        ent = []
        for v in values:
            cfg = base.replace(**{name: v})
            ent.append(maxlike_reconstruct(grid, effects, cfg).entropy)
        ent = np.array(ent)
        table[name] = {"values": list(values), "S_D": ent.tolist(), "spread": float(ent.max() - ent.min())}
    return table


def demon_entropy(rho_joint: np.ndarray) -> float:
    return von_neumann_entropy(partial_trace(rho_joint, "cavity"))
