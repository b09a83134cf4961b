"""Dense operator algebra on the truncated qubit (x) cavity space.

All operators are plain complex ``numpy`` arrays.  Joint operators use a
qubit-major ordering: the joint index of ``|q, n>`` is ``q * (n_trunc + 1) + n``
with ``q = 0`` for ``|g>`` and ``q = 1`` for ``|e>``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import InvalidDimensionError, InvalidStateError, ShapeError

TRACE_TOL = 1e-9
PSD_TOL = 1e-10

QUBIT = "qubit"
CAVITY = "cavity"

G, E = 0, 1


def fock_annihilation(n_trunc: int) -> np.ndarray:
    """Annihilation operator on Fock states ``0..n_trunc``."""
    if int(n_trunc) != n_trunc or n_trunc < 1:
        raise InvalidDimensionError(f"n_trunc must be an integer >= 1, got {n_trunc!r}")
    n_trunc = int(n_trunc)
    return np.diag(np.sqrt(np.arange(1, n_trunc + 1, dtype=float)), 1).astype(complex)


def number_operator(n_trunc: int) -> np.ndarray:
    return np.diag(np.arange(n_trunc + 1, dtype=float)).astype(complex)


def sigma_minus() -> np.ndarray:
    """``|g><e|`` in the (g, e) basis."""
    out = np.zeros((2, 2), dtype=complex)
    out[G, E] = 1.0
    return out


def sigma_plus() -> np.ndarray:
    return sigma_minus().T.copy()


def sigma_x() -> np.ndarray:
    return sigma_plus() + sigma_minus()


def sigma_y() -> np.ndarray:
    # fixed by [sigma_z, sigma_x] = 2i sigma_y
    return -1j * sigma_plus() + 1j * sigma_minus()


def sigma_z() -> np.ndarray:
    return np.diag([-1.0, 1.0]).astype(complex)


def projector_e() -> np.ndarray:
    return np.diag([0.0, 1.0]).astype(complex)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product ``a (x) b``; ``a`` is the slow (qubit) factor."""
    return np.kron(a, b)


@dataclass(frozen=True)
class JointSpace:
    """Qubit (x) cavity space truncated at ``n_trunc`` photons."""

    n_trunc: int

    def __post_init__(self):
        if int(self.n_trunc) != self.n_trunc or self.n_trunc < 1:
            raise InvalidDimensionError(f"n_trunc must be an integer >= 1, got {self.n_trunc!r}")

    @property
    def n_fock(self) -> int:
        return self.n_trunc + 1

    @property
    def dim(self) -> int:
        return 2 * self.n_fock

    def index(self, q: int, n: int) -> int:
        return q * self.n_fock + n

    def basis(self, q: int, n: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(q, n)] = 1.0
        return v

    def qubit_op(self, op: np.ndarray) -> np.ndarray:
        return tensor(op, np.eye(self.n_fock))

    def cavity_op(self, op: np.ndarray) -> np.ndarray:
        return tensor(np.eye(2), op)

    @cached_property
    def d(self) -> np.ndarray:
        return self.cavity_op(fock_annihilation(self.n_trunc))

    @cached_property
    def n(self) -> np.ndarray:
        return self.cavity_op(number_operator(self.n_trunc))

    @cached_property
    def sm(self) -> np.ndarray:
        return self.qubit_op(sigma_minus())

    @cached_property
    def sp(self) -> np.ndarray:
        return self.qubit_op(sigma_plus())

    @cached_property
    def sx(self) -> np.ndarray:
        return self.qubit_op(sigma_x())

    @cached_property
    def sy(self) -> np.ndarray:
        return self.qubit_op(sigma_y())

    @cached_property
    def sz(self) -> np.ndarray:
        return self.qubit_op(sigma_z())

    @cached_property
    def pe(self) -> np.ndarray:
        return self.qubit_op(projector_e())

    def check(self, op: np.ndarray) -> np.ndarray:
        op = np.asarray(op)
        if op.shape != (self.dim, self.dim):
            raise ShapeError(f"expected a {self.dim}x{self.dim} joint operator, got {op.shape}")
        return op


def displacement(beta: complex, n_trunc: int) -> np.ndarray:
    """Displacement ``exp(beta d^+ - beta* d)`` by dense matrix exponential."""
    if abs(beta) ** 2 > n_trunc / 4:
        warnings.warn(
            f"|beta|^2 = {abs(beta) ** 2:.3g} exceeds n_trunc/4 = {n_trunc / 4:.3g}; "
            "truncation error may be significant",
            stacklevel=2,
        )
    a = fock_annihilation(n_trunc)
    return expm(beta * a.conj().T - np.conj(beta) * a)


def safe_fock_cutoff(beta_abs: float, margin: int = 10) -> int:
    """Truncation for which ``displacement`` stays unitary to ~1e-6."""
    return int(np.ceil(beta_abs**2 + 6 * beta_abs + margin))


def coherent_amplitudes(alpha: complex, n_trunc: int) -> np.ndarray:
    n = np.arange(n_trunc + 1)
    if alpha == 0:
        out = np.zeros(n_trunc + 1, dtype=complex)
        out[0] = 1.0
        return out
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def coherent_state(alpha: complex, n_trunc: int) -> np.ndarray:
    """Density matrix ``|alpha><alpha|`` with analytic Fock amplitudes (unnormalised tail cut)."""
    psi = coherent_amplitudes(alpha, n_trunc)
    return np.outer(psi, psi.conj())


def thermal_state(ratio: float, n_trunc: int) -> np.ndarray:
    """Geometric Fock distribution with ``P(n+1)/P(n) = ratio``, renormalised on the truncation."""
    if not 0 <= ratio < 1:
        raise ValueError(f"Boltzmann ratio must lie in [0, 1), got {ratio}")
    p = ratio ** np.arange(n_trunc + 1)
    return np.diag(p / p.sum()).astype(complex)


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def partial_trace(rho: np.ndarray, keep: str, n_trunc: int | None = None) -> np.ndarray:
    """Reduced state on ``keep`` (``"qubit"`` or ``"cavity"``) of a joint density matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] % 2:
        raise ShapeError(f"joint density matrix must be square with even dimension, got {rho.shape}")
    nf = rho.shape[0] // 2
    if n_trunc is not None and nf != n_trunc + 1:
        raise ShapeError(f"dimension {rho.shape[0]} does not match n_trunc={n_trunc}")
    r = rho.reshape(2, nf, 2, nf)
    if keep == QUBIT:
        return np.einsum("anbn->ab", r)
    if keep == CAVITY:
        return np.einsum("qnqm->nm", r)
    raise ValueError(f"keep must be {QUBIT!r} or {CAVITY!r}, got {keep!r}")


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def von_neumann_entropy(rho: np.ndarray, psd_tol: float = PSD_TOL) -> float:
    """Entropy in nats; eigenvalues below ``psd_tol`` count as zero."""
    lam = np.linalg.eigvalsh(hermitize(np.asarray(rho)))
    lam = lam[lam > psd_tol]
    return float(-np.sum(lam * np.log(lam)))


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho_idx = np.nonzero(u - css / k > 0)[0][-1]
    shift = css[rho_idx] / (rho_idx + 1)
    return np.maximum(v - shift, 0.0)


def project_to_density_matrix(m: np.ndarray) -> np.ndarray:
    """Nearest density matrix to ``m`` in Frobenius norm."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got {m.shape}")
    lam, vec = np.linalg.eigh(hermitize(m))
    lam = project_to_simplex(lam)
    return (vec * lam) @ vec.conj().T


def validate_density_matrix(
    rho: np.ndarray, trace_tol: float = TRACE_TOL, psd_tol: float = PSD_TOL
) -> np.ndarray:
    """Return ``rho`` unchanged if it is a valid state, else raise ``InvalidStateError``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        raise InvalidStateError(f"trace {tr:.3e} differs from 1 by more than {trace_tol:g}")
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > psd_tol:
        raise InvalidStateError(f"non-Hermitian part {herm_err:.3e} exceeds {psd_tol:g}")
    lam_min = np.linalg.eigvalsh(hermitize(rho))[0]
    if lam_min < -psd_tol:
        raise InvalidStateError(f"minimum eigenvalue {lam_min:.3e} below -{psd_tol:g}")
    return rho


def expect(op: np.ndarray, rho: np.ndarray) -> complex:
    # Tr(op rho) without forming the product
    return complex(np.sum(op.T * rho))


def fidelity_pure(psi: np.ndarray, rho: np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(psi.conj() @ rho @ psi))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(hermitize(a - b)))))


def shannon_binary_nats(p: float) -> float:
    """``ln 2 * H2(p)``, the binary Shannon entropy in nats."""
    p = float(np.clip(p, 0.0, 1.0))
    return float(-sum(x * np.log(x) for x in (p, 1 - p) if x > 0))
