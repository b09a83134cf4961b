import numpy as np
import pytest

from qdemon import sequences as S
from qdemon.dynamics import boltzmann_ratio
from qdemon.operators import partial_trace, thermal_state
from qdemon.protocol import DEMON_ALPHA, DemonSimulator, _parse_prep, memory_reset, time_grid
from qdemon.thermo import boltzmann_population, landauer_ratio


@pytest.fixture(scope="module")
def sim(params):
    return DemonSimulator(params, 20)


def test_time_grid_contains_markers(params):
    seq = S.make_sequential_sequence("pi", 1.0, params, S.ideal_calibration())
    t = time_grid(seq, 1e-9)
    for m in list(seq.markers.values()) + seq.breakpoints():
        assert np.min(np.abs(t - m)) <= 1e-18
    assert np.all(np.diff(t) > 0) and np.max(np.diff(t)) <= 1e-9 + 1e-18


def test_parse_prep():
    assert _parse_prep(0.17) == ("T=0.17K", 0.17)
    assert _parse_prep("T=inf") == ("T=inf", np.inf)
    assert _parse_prep("T=0.4K") == ("T=0.4K", 0.4)
    assert _parse_prep("superposition") == ("superposition", None)


def test_memory_reset_replaces_cavity(params, rng):
    from conftest import random_density

    rho = random_density(2 * 6, rng)
    out = memory_reset(rho, params, 5)
    assert np.allclose(partial_trace(out, "qubit", 5), partial_trace(rho, "qubit", 5))
    assert np.allclose(partial_trace(out, "cavity", 5), thermal_state(boltzmann_ratio(params.f_D, params.T_D0), 5))


@pytest.mark.parametrize("T", [0.17, 0.40, np.inf])
def test_thermal_mixture_hits_boltzmann(sim, params, T):
    run = sim.run("sequential", T, 1.0)
    assert run.p_e(1) == pytest.approx(boltzmann_population(T, params.f_S), abs=1e-10)
    assert len(run.branches) == 2 and sum(run.weights) == pytest.approx(1.0)


def test_run_states_are_valid(sim):
    run = sim.run("sequential", "superposition", 1.5)
    for k in (1, 2, 3, 4):
        rho = getattr(run.states, f"rho_{k}")
        assert abs(np.trace(rho) - 1) <= 1e-9
        assert np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) >= -1e-6
    assert run.max_trace_err <= 1e-9
    s = run.summary()
    assert s["prep"] == "superposition" and len(s["S_S"]) == 4


def test_superposition_prep_is_half_flip(sim):
    run = sim.run("sequential", "superposition", 0.0)
    q = run.qubit(1)
    assert q[1, 1].real == pytest.approx(0.5, abs=0.05)
    assert abs(q[0, 1]) >= 0.4


def test_encoding_fills_cavity(sim):
    low, high = sim.run("sequential", "equilibrium", 0.5), sim.run("sequential", "equilibrium", 2.5)
    n2 = lambda r: r.summary()["nbar2"]
    assert n2(high) > n2(low) > 0.1


def test_branch_cache(sim):
    assert sim.branch("sequential", "excited", 0.5) is sim.branch("sequential", "excited", 0.5)


def test_fixed_step_is_reproducible(params):
    a = DemonSimulator(params, 6, fixed_step=0.1e-9, calibration=S.ideal_calibration()).run("sequential", "pi_half", 1.0)
    b = DemonSimulator(params, 6, fixed_step=0.1e-9, calibration=S.ideal_calibration()).run("sequential", "pi_half", 1.0)
    assert np.array_equal(a.states.rho_3, b.states.rho_3)
    assert a.record.to_csv() == b.record.to_csv()


def test_demon_alpha_working_point(sim):
    sup = sim.run("sequential", "superposition", DEMON_ALPHA)
    assert sup.S_D(3) == pytest.approx(1.06, abs=0.01)


def test_free_reset_relaxes_toward_equilibrium(params):
    fast = DemonSimulator(params, 8, reset_duration=2e-6, calibration=S.ideal_calibration())
    run = fast.run("sequential", "excited", 1.0)
    # the cavity drains through kappa_D; the qubit relaxes toward p_e0
    assert run.cavity(4)[0, 0].real > run.cavity(3)[0, 0].real
    assert abs(run.p_e(4) - params.p_e0) < abs(run.p_e(3) - params.p_e0) + 1e-12


def test_landauer_fraction_continuous(params):
    sim30 = DemonSimulator(params, 30)
    alpha = S.nbar_to_alpha(9.0, params, 30, kind="continuous")
    run = sim30.run("continuous", 0.40, alpha)
    ratio = landauer_ratio(run.record.work_J, 0.40)
    assert 0 < ratio <= 0.45
