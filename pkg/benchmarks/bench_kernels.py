"""Compare the compiled Lindblad kernel with the numpy fallback and a dense reference.

    python3 benchmarks/bench_kernels.py [--repeat 200]

Reports the time per generator evaluation at several truncations and the
wall time of one driven evolution per backend.
"""
import argparse
import time

import numpy as np

from qdemon import kernels
from qdemon import sequences as S
from qdemon.device import DeviceParams
from qdemon.dynamics import diagonal_energies, equilibrium_state, evolve
from qdemon.operators import fock_annihilation, sigma_minus, tensor


def dense_rhs(p, n_trunc):
    """Dense ``L(rho)`` with full matrix products, O(D^3) per call."""
    nf = n_trunc + 1
    h = np.diag(diagonal_energies(p, n_trunc, 0.0, 0.0)).astype(complex)
    d = tensor(np.eye(2), fock_annihilation(n_trunc))
    sm = tensor(sigma_minus(), np.eye(nf))
    sz = tensor(np.diag([-1.0, 1.0]), np.eye(nf))
    ops = [(p.kappa_rate, d), (p.gamma_down, sm), (p.gamma_up, sm.conj().T), (p.gamma_phi / 2, sz)]
    ops = [(r, L, L.conj().T @ L) for r, L in ops]

    def rhs(rho, cq, eps):
        hh = h + cq * sm.conj().T + np.conj(cq) * sm + eps * d.conj().T + np.conj(eps) * d
        out = -1j * (hh @ rho - rho @ hh)
        for r, L, LdL in ops:
            out += r * (L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL))
        return out

    return rhs


def time_call(fn, repeat):
    fn()
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def bench_kernels(p, repeat):
    rng = np.random.default_rng(0)
    cq, eps = -0.5j * 4e7, 3e7 + 1e6j
    print(f"{'n_trunc':>8} {'D':>5} " + " ".join(f"{name:>12}" for name in [*sorted(kernels.BACKENDS), "dense"]) + "   (us per call)")
    for n_trunc in (10, 20, 30, 40):
        nf, D = n_trunc + 1, 2 * (n_trunc + 1)
        rho = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
        rho = rho @ rho.conj().T
        rho /= np.trace(rho)
        out = np.empty_like(rho)
        h_diag = diagonal_energies(p, n_trunc, 0.0, 0.0)
        args = (h_diag, nf, cq, eps, p.kappa_rate, p.gamma_down, p.gamma_up, p.gamma_phi / 2, False)
        row, ref = [], None
        for name in sorted(kernels.BACKENDS):
            k = kernels.BACKENDS[name]
            row.append(time_call(lambda: k(rho, out, *args), repeat))
            k(rho, out, *args)
            ref = out.copy() if ref is None else ref
            assert np.allclose(out, ref, atol=1e-6 * np.max(np.abs(ref)))
        dense = dense_rhs(p, n_trunc)
        row.append(time_call(lambda: dense(rho, cq, eps), max(1, repeat // 10)))
        assert np.allclose(dense(rho, cq, eps), ref, atol=1e-6 * np.max(np.abs(ref)))
        print(f"{n_trunc:>8} {D:>5} " + " ".join(f"{1e6 * t:12.1f}" for t in row))


def bench_evolution(p):
    cal = S.ideal_calibration()
    seq = S.make_sequential_sequence("pi_half", 2.0, p, cal)
    t = np.linspace(0.0, seq.total_duration, 301)
    rho0 = equilibrium_state(p, 20)
    print("\none sequential demon cycle, n_trunc = 20")
    for name in sorted(kernels.BACKENDS):
        t0 = time.perf_counter()
        evolve(rho0, p, seq, t, n_trunc=20, backend=name)
        print(f"  {name:>10}: {time.perf_counter() - t0:6.2f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    p = DeviceParams()
    print(f"active backend: {kernels.BACKEND}")
    bench_kernels(p, args.repeat)
    bench_evolution(p)


if __name__ == "__main__":
    main()
