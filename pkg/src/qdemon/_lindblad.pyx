# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled structured Lindblad generator; same contract as ``_lindblad_py.lindblad_rhs``."""
from libc.math cimport sqrt

ctypedef double complex cplx


cdef inline cplx _conj(cplx z) nogil:
    return z.real - 1j * z.imag


def lindblad_rhs(cplx[:, ::1] rho, cplx[:, ::1] out, double[::1] h_diag, Py_ssize_t n_fock,
                 cplx cq, cplx eps, double kappa, double g_down, double g_up, double g_phi_half,
                 bint adjoint=False):
    cdef Py_ssize_t N = n_fock
    cdef Py_ssize_t D = 2 * N
    cdef Py_ssize_t j, k, qj, qk, nj, nk, jg, je, kg, ke
    cdef double gj, gk, sj, sk
    cdef cplx acc, hl, hr
    cdef cplx sgn = 1j if adjoint else -1j
    cdef cplx cqc = _conj(cq)
    cdef cplx epsc = _conj(eps)
    cdef bint has_q = cq != 0
    cdef bint has_c = eps != 0

    with nogil:
        for j in range(D):
            qj = j // N
            nj = j - qj * N
            gj = kappa * nj + g_phi_half + (g_down if qj == 1 else g_up)
            sj = 1.0 if qj == 1 else -1.0
            for k in range(D):
                qk = k // N
                nk = k - qk * N
                gk = kappa * nk + g_phi_half + (g_down if qk == 1 else g_up)
                sk = 1.0 if qk == 1 else -1.0
                acc = (sgn * (h_diag[j] - h_diag[k]) - 0.5 * (gj + gk)) * rho[j, k]

                # commutator with the drive terms: (H rho)_jk - (rho H)_jk
                hl = 0
                hr = 0
                if has_q:
                    if qj == 1:
                        hl = hl + cq * rho[nj, k]
                    else:
                        hl = hl + cqc * rho[N + nj, k]
                    if qk == 0:
                        hr = hr + cq * rho[j, N + nk]
                    else:
                        hr = hr + cqc * rho[j, nk]
                if has_c:
                    if nj > 0:
                        hl = hl + eps * sqrt(<double>nj) * rho[j - 1, k]
                    if nj < N - 1:
                        hl = hl + epsc * sqrt(<double>(nj + 1)) * rho[j + 1, k]
                    if nk < N - 1:
                        hr = hr + eps * sqrt(<double>(nk + 1)) * rho[j, k + 1]
                    if nk > 0:
                        hr = hr + epsc * sqrt(<double>nk) * rho[j, k - 1]
                acc = acc + sgn * (hl - hr)

                if kappa != 0:
                    if adjoint:
                        if nj > 0 and nk > 0:
                            acc = acc + kappa * sqrt(<double>nj * nk) * rho[j - 1, k - 1]
                    else:
                        if nj < N - 1 and nk < N - 1:
                            acc = acc + kappa * sqrt(<double>(nj + 1) * (nk + 1)) * rho[j + 1, k + 1]
                if qj == qk:
                    if adjoint:
                        if qj == 1:
                            acc = acc + g_down * rho[nj, nk]
                        else:
                            acc = acc + g_up * rho[N + nj, N + nk]
                    else:
                        if qj == 0:
                            acc = acc + g_down * rho[N + nj, N + nk]
                        else:
                            acc = acc + g_up * rho[nj, nk]
                acc = acc + g_phi_half * sj * sk * rho[j, k]
                out[j, k] = acc
    return out
