"""Acceptance suite: one test per criterion, each also reported as a PASS/FAIL line.

Run standalone with ``python3 tests/test_acceptance.py`` or through pytest,
where the lines appear in the terminal summary.
"""
import os
import sys
import time
import warnings

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qdemon import sequences as S  # noqa: E402
from qdemon import thermo as th  # noqa: E402
from qdemon import tomography as T  # noqa: E402
from qdemon.constants import BOLTZMANN_K, PLANCK_H  # noqa: E402
from qdemon.device import DeviceParams  # noqa: E402
from qdemon.dynamics import evolve, evolve_adjoint  # noqa: E402
from qdemon.operators import JointSpace, coherent_amplitudes, fidelity_pure, ket_to_dm, partial_trace, shannon_binary_nats, tensor  # noqa: E402
from qdemon.protocol import DEMON_ALPHA, DemonSimulator  # noqa: E402
from conftest import random_density, random_effect  # noqa: E402

REPORT = {}
THERMAL = [0.17, 0.40, np.inf]
SEQ_PREPS = ["ground", "equilibrium", "excited", "superposition"] + THERMAL
CONT_PREPS = ["equilibrium", "excited", "superposition"] + THERMAL


def record(k, ok, detail):
    REPORT[k] = (bool(ok), detail)
    line = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    return line


def report_lines():
    return [f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {d}" for k, (ok, d) in sorted(REPORT.items())]


# ---------------------------------------------------------------- shared simulations

_cache = {}


def _params():
    return _cache.setdefault("params", DeviceParams())


def seq_sim():
    return _cache.setdefault("seq20", DemonSimulator(_params(), 20))


def seq_sim30():
    return _cache.setdefault("seq30", DemonSimulator(_params(), 30))


def cont_sim():
    return _cache.setdefault("cont30", DemonSimulator(_params(), 30))


def alpha_nbar9(kind):
    key = ("a9", kind)
    if key not in _cache:
        _cache[key] = S.nbar_to_alpha(9.0, _params(), 30, kind)
    return _cache[key]


def desk_effects():
    if "effects" not in _cache:
        run = seq_sim().run("sequential", "superposition", DEMON_ALPHA)
        p_g = float(np.real(run.qubit(3)[0, 0]))
        cfg = T.ReconstructionConfig(n_trunc_recon=10, p_g=p_g)
        eff = T.build_effects(T.TomographyGrid.desk(), _params(), cfg, n_rows=21)
        _cache["effects"] = (eff, cfg, run)
    return _cache["effects"]


# ---------------------------------------------------------------- criteria

def check_1():
    """Trace and positivity over the full continuous sequence at n_trunc = 20."""
    p = _params()
    alpha = alpha_nbar9("continuous")
    worst_tr, worst_eig, slowest = 0.0, np.inf, 0.0
    for prep in ("excited", "superposition", "equilibrium"):
        t0 = time.perf_counter()
        run = DemonSimulator(p, 20).branch("continuous", prep, alpha)
        slowest = max(slowest, time.perf_counter() - t0)
        traj = run.trajectory
        worst_tr = max(worst_tr, float(np.max(traj["trace_err"])))
        worst_eig = min(worst_eig, float(np.nanmin(traj.min_eigenvalues)))
    ok = worst_tr <= 1e-9 and worst_eig >= -1e-6 and slowest <= 60
    return record(1, ok, f"max|Tr-1|={worst_tr:.1e} min eig={worst_eig:.1e} slowest run={slowest:.1f}s")


def check_2():
    """One-photon work quantum from a calibrated pi pulse, decoherence off."""
    p = _params().without_decoherence()
    amp = S.calibrate_pi_amplitude(p)
    seg = S.PulseSegment(S.QUBIT_PORT, "gaussian", 0.0, 4 * S.SEQ_SIGMA, amp, 0.0, S.SEQ_SIGMA)
    seq = S.PulseSequence([seg], seg.end, {"extract_start": 0.0, "extract_end": seg.end})
    t = np.linspace(0.0, seg.end, 2001)
    sp = JointSpace(2)
    w = {}
    for q in (0, 1):
        traj = evolve(ket_to_dm(sp.basis(q, 0)), p, seq, t, tol=1e-11, n_trunc=2)
        w[q] = th.work(traj, p, seq).work_over_hfs
    ok = abs(w[1] - 1) <= 1e-3 and abs(w[0] + 1) <= 1e-3
    return record(2, ok, f"W(e,0)={w[1]:+.6f} W(g,0)={w[0]:+.6f} hf_S")


def check_3():
    """Sign structure of the work in the continuous sequence."""
    sim = cont_sim()
    a9 = alpha_nbar9("continuous")
    w9 = [sim.run("continuous", T_, a9).work_hfs for T_ in THERMAL]
    w0 = [sim.run("continuous", T_, 0.0).work_hfs for T_ in THERMAL]
    sup = sim.run("continuous", "superposition", 0.0)
    p_sup = sup.record.power_over_hfs
    parts = {
        "W>0 at nbar=9": all(w > 0 for w in w9),
        "ordered in T": bool(np.all(np.diff(w9) > 0)),
        "W<0 at nbar=0": all(w < 0 for w in w0),
        "|W_sup|<=0.05": abs(sup.work_hfs) <= 0.05,
        "P_sup changes sign": bool(np.min(p_sup) < 0 < np.max(p_sup)),
    }
    failed = [k for k, v in parts.items() if not v]
    detail = (f"nbar=9 W={np.round(w9, 4).tolist()} nbar=0 W={np.round(w0, 4).tolist()} "
              f"W_sup(nbar=0)={sup.work_hfs:+.4f}" + (f" failing: {', '.join(failed)}" if failed else ""))
    return record(3, not failed, detail)


def check_4():
    """Cooling endpoint of the sequential sequence at nbar ~ 9."""
    sim = seq_sim30()
    a9 = alpha_nbar9("sequential")
    pe = {str(prep): sim.run("sequential", prep, a9).p_e(4) for prep in SEQ_PREPS}
    worst = max(pe, key=pe.get)
    return record(4, pe[worst] <= 0.045, f"alpha_in={a9:.3f} max p_e(4)={pe[worst]:.4f} ({worst})")


def check_5():
    """First-law bookkeeping with spontaneous emission booked as heat."""
    runs = []
    for a in (0.0, DEMON_ALPHA):
        runs += [seq_sim().run("sequential", prep, a) for prep in SEQ_PREPS]
    runs += [seq_sim30().run("sequential", prep, alpha_nbar9("sequential")) for prep in SEQ_PREPS]
    for a in (0.0, alpha_nbar9("continuous")):
        runs += [cont_sim().run("continuous", prep, a) for prep in CONT_PREPS]
    worst = {}
    for r in runs:
        res = abs(r.record.spont_balance_residual)
        net = abs(r.record.balance_residual)
        w = worst.setdefault(r.kind, [0.0, 0.0])
        w[0], w[1] = max(w[0], res), max(w[1], net)
    ok = all(v[0] <= 1e-3 for v in worst.values())
    detail = " ".join(f"{k}: max|W+dU+Q_spont|={v[0]:.2e} (net-heat {v[1]:.1e})" for k, v in sorted(worst.items()))
    return record(5, ok, f"{len(runs)} runs; {detail}")


def check_6():
    """Entropy transferred to the memory at the working point."""
    sim = seq_sim()
    sup = sim.run("sequential", "superposition", DEMON_ALPHA).S_D(3)
    mix = sim.maximally_mixed("sequential", DEMON_ALPHA).S_D(3)
    slack = np.inf
    for a in (0.0, 1.0, DEMON_ALPHA):
        for prep in SEQ_PREPS:
            r = sim.run("sequential", prep, a)
            slack = min(slack, r.S_D(3) - (r.S_S(1) - r.S_S(3)))
    ok = 0.95 <= sup <= 1.15 and 1.05 <= mix <= 1.30 and mix > sup and slack >= -0.02
    return record(6, ok, f"S_D(sup)={sup:.4f} S_D(mixed)={mix:.4f} min[S_D-dS_S]={slack:+.4f}")


def check_7():
    """System entropy after the cycle against the binary entropy of the vacuum weight."""
    p, sim = _params(), seq_sim()
    alphas = np.linspace(0.0, 3.0, 13)
    cold = np.array([sim.run("sequential", "ground", a).S_S(4) for a in alphas])
    hot = np.array([sim.run("sequential", np.inf, a).S_S(4) for a in alphas])
    p0 = [float(np.real(partial_trace(S.encoded_state(a, p, 20), "cavity", 20)[0, 0])) for a in alphas]
    ref = np.array([shannon_binary_nats(x) for x in p0])
    k = int(np.argmax(cold))
    interior = 0 < k < len(alphas) - 1
    dev = float(np.max(np.abs(cold - ref)))
    monotone = bool(np.all(np.diff(hot) <= 1e-9))
    ok = interior and dev <= 0.1 and monotone
    return record(7, ok, f"max at alpha_in={alphas[k]:.2f} (S_S={cold[k]:.3f}) max|S_S-H2|={dev:.3f} hot curve monotone={monotone}")


def check_8():
    """MaxLike round trip at desk scale."""
    t0 = time.perf_counter()
    eff, cfg, run = desk_effects()
    p_g = cfg.p_g
    qubit = np.diag([p_g, 1 - p_g]).astype(complex)
    fid = {}
    for name, a in (("vacuum", 0.0), ("coherent(1.2)", 1.2)):
        psi = coherent_amplitudes(a, 20)
        g = T.simulate_tomography(tensor(qubit, ket_to_dm(psi)), eff)
        rec = T.maxlike_reconstruct(g, eff, cfg)
        fid[name] = fidelity_pure(psi[:11] / np.linalg.norm(psi[:11]), rec.rho)
    g = T.simulate_tomography(run.states.rho_3, eff)
    err = T.maxlike_reconstruct(g, eff, cfg).entropy - run.S_D(3)
    elapsed = time.perf_counter() - t0
    ok = min(fid.values()) >= 0.99 and abs(err) <= 0.1 and elapsed <= 600
    fs = " ".join(f"F[{k}]={v:.5f}" for k, v in fid.items())
    return record(8, ok, f"{fs} demon entropy error={err:+.4f} runtime={elapsed:.0f}s")


def check_9():
    """Entropy plateau against truncation and assumed qubit population."""
    eff, cfg, run = desk_effects()
    g = T.simulate_tomography(run.states.rho_3, eff)
    base = cfg.replace(n_trunc_recon=15)
    sweep = T.entropy_sensitivity_sweep(g, eff, base, {"n_trunc_recon": [13, 15, 17], "p_g": list(np.linspace(0.95, 0.99, 5))})
    r, q = sweep["n_trunc_recon"]["spread"], sweep["p_g"]["spread"]
    ok = r <= 0.05 and q <= 0.02
    vals = np.round(sweep["p_g"]["S_D"], 3).tolist()
    return record(9, ok, f"spread over n_trunc_recon={r:.4f} spread over p_g={q:.4f} (S_D={vals})")


def check_10():
    """Formula layer."""
    p = _params()
    f_S, T0, F = p.f_S, 0.103, 0.92
    pe0 = 1 / (1 + np.exp(PLANCK_H * f_S / (BOLTZMANN_K * T0)))
    prep_err = 0.0
    for T_ in (0.12, 0.17, 0.40, 1.0):
        w = S.thermal_prep_probability(T_, T0, F, f_S)
        mix = w * (F * (1 - pe0) + (1 - F) * pe0) + (1 - w) * pe0
        prep_err = max(prep_err, abs(mix - th.boltzmann_population(T_, f_S)))
    t_d = th.demon_temperature_from_P1(0.007, p.f_D)
    inv_err = max(abs(th.temperature_from_population(th.boltzmann_population(T_, f_S), f_S) - T_) / T_ for T_ in (0.05, 0.103, 0.4, 2.0))
    truth = th.GainModel(3.2, omega_inf=2 * np.pi * 150e6)
    omegas = 2 * np.pi * np.linspace(2e6, 30e6, 8)
    a_i, a_p = th.rabi_amplitudes(omegas, truth, -0.93, p.gamma_b)
    fit = th.calibrate_gain(np.column_stack([omegas, a_i, a_p]), -0.93, p.gamma_b).model
    gain_err = max(abs(fit.g0 / truth.g0 - 1), abs(fit.omega_inf / truth.omega_inf - 1))
    ok = prep_err <= 1e-10 and 0.059 <= t_d <= 0.085 and inv_err <= 1e-10 and gain_err <= 1e-6
    return record(10, ok, f"prep err={prep_err:.1e} T_D(P1=0.7%)={1e3 * t_d:.1f} mK inversion err={inv_err:.1e} gain err={gain_err:.1e}")


def check_11():
    """Duality of forward and adjoint evolution with dissipation on."""
    p = _params()
    rng = np.random.default_rng(11)
    segs = [S.PulseSegment(S.QUBIT_PORT, "gaussian", 0.0, 40e-9, 4e7, 3e6, 10e-9),
            S.gaussian_segment(S.CAVITY_PORT, 20e-9, 10e-9, 1.2)]
    seq = S.PulseSequence(segs, 60e-9)
    t = np.array([0.0, seq.total_duration])
    errs = []
    for _ in range(20):
        rho0, e_T = random_density(8, rng), random_effect(8, rng)
        rho_T = evolve(rho0, p, seq, t, 1e-10, n_trunc=3).final_state
        e_0 = evolve_adjoint(e_T, p, seq, t, 1e-10, adjoint_includes_excitation=True, n_trunc=3).matrix
        errs.append(abs(np.trace(rho_T @ e_T) - np.trace(rho0 @ e_0)))
    return record(11, max(errs) <= 1e-7, f"max duality error={max(errs):.1e} over 20 pairs")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9, check_10, check_11]


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{i}" for i in range(1, 12)])
def test_criterion(check):
    line = check()
    assert "PASS" in line, line


if __name__ == "__main__":
    warnings.simplefilter("ignore")
    for c in CHECKS:
        c()
    print("\n".join(report_lines()))
    sys.exit(0 if all(ok for ok, _ in REPORT.values()) else 1)
