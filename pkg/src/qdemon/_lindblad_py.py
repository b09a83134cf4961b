"""Pure-numpy structured Lindblad generator (fallback for the compiled kernel).

The generator exploits the structure of the demon model: the undriven
Hamiltonian and every ``O^+ O`` are diagonal, the drives couple ``|g,n>`` to
``|e,n>`` and ``n`` to ``n +/- 1``, and every jump operator is a shift.  Cost
is O(D^2) instead of the O(D^3) of dense matrix products.
"""
from __future__ import annotations

import numpy as np


def decay_diagonal(n_fock, kappa, g_down, g_up, g_phi_half):
    n = np.arange(n_fock, dtype=float)
    gam = np.empty(2 * n_fock)
    gam[:n_fock] = kappa * n + g_up + g_phi_half
    gam[n_fock:] = kappa * n + g_down + g_phi_half
    return gam


def _apply_h_left(x, cq, eps, sq):
    """``H_off @ x`` for x viewed as (2, N, D)."""
    out = np.zeros_like(x)
    if cq != 0:
        out[1] += cq * x[0]
        out[0] += np.conj(cq) * x[1]
    if eps != 0:
        out[:, 1:] += eps * sq[1:, None] * x[:, :-1]
        out[:, :-1] += np.conj(eps) * sq[1:, None] * x[:, 1:]
    return out


def lindblad_rhs(rho, out, h_diag, n_fock, cq, eps, kappa, g_down, g_up, g_phi_half, adjoint=False):
    """Write ``L(rho)`` (or the adjoint ``L^+(rho)``) into ``out``; both D x D complex."""
    N = n_fock
    D = 2 * N
    gam = decay_diagonal(N, kappa, g_down, g_up, g_phi_half)
    sign = 1j if adjoint else -1j
    diag_part = sign * (h_diag[:, None] - h_diag[None, :]) - 0.5 * (gam[:, None] + gam[None, :])
    np.multiply(diag_part, rho, out=out)

    sq = np.sqrt(np.arange(N, dtype=float))
    if cq != 0 or eps != 0:
        left = _apply_h_left(rho.reshape(2, N, D), cq, eps, sq).reshape(D, D)
        # rho @ H_off = (H_off @ rho^+)^+ because H_off is Hermitian
        right = _apply_h_left(rho.conj().T.reshape(2, N, D), cq, eps, sq).reshape(D, D).conj().T
        out += sign * (left - right)

    r4 = rho.reshape(2, N, 2, N)
    o4 = out.reshape(2, N, 2, N)
    if kappa != 0:
        w = kappa * (sq[1:, None] * sq[None, 1:])[None, :, None, :]
        if adjoint:
            o4[:, 1:, :, 1:] += w * r4[:, :-1, :, :-1]
        else:
            o4[:, :-1, :, :-1] += w * r4[:, 1:, :, 1:]
    if adjoint:
        if g_down != 0:
            o4[1, :, 1, :] += g_down * r4[0, :, 0, :]
        if g_up != 0:
            o4[0, :, 0, :] += g_up * r4[1, :, 1, :]
    else:
        if g_down != 0:
            o4[0, :, 0, :] += g_down * r4[1, :, 1, :]
        if g_up != 0:
            o4[1, :, 1, :] += g_up * r4[0, :, 0, :]
    if g_phi_half != 0:
        # sigma_z rho sigma_z flips the sign of the qubit-off-diagonal blocks
        o4[0, :, 0, :] += g_phi_half * r4[0, :, 0, :]
        o4[1, :, 1, :] += g_phi_half * r4[1, :, 1, :]
        o4[0, :, 1, :] -= g_phi_half * r4[0, :, 1, :]
        o4[1, :, 0, :] -= g_phi_half * r4[1, :, 0, :]
    return out
