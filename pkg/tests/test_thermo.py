import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdemon import sequences as S
from qdemon import thermo as th
from qdemon.constants import BOLTZMANN_K, PLANCK_H
from qdemon.dynamics import evolve
from qdemon.errors import GainModelDomainError, InconsistentContrast, InsufficientData, NegativeTemperature, ParameterError
from qdemon.operators import JointSpace, ket_to_dm

F_S = 7.088e9
HF_OVER_K = PLANCK_H * F_S / BOLTZMANN_K


def _pi_pulse_run(params, q0):
    """Calibrated Gaussian pi pulse on |q0, 0>, on a fine grid."""
    sp = JointSpace(2)
    rho0 = ket_to_dm(sp.basis(q0, 0))
    amp = np.pi / S.gaussian_area(S.SEQ_SIGMA)
    seg = S.PulseSegment(S.QUBIT_PORT, "gaussian", 0.0, 50e-9, amp, 0.0, S.SEQ_SIGMA)
    seq = S.PulseSequence([seg], 50e-9, {"extract_start": 0.0, "extract_end": 50e-9})
    t = np.linspace(0, 50e-9, 4001)
    return evolve(rho0, params, seq, t, tol=1e-11, n_trunc=2), seq


# ---------------------------------------------------------------- power and work

def test_power_ground_undriven():
    total, w, q = th.extracted_power({"sx": [0.0], "sz": [-1.0]}, 0.0, 4.5e5)
    assert total[0] == 0 and w[0] == 0 and q[0] == 0


def test_power_excited_undriven():
    total, w, q = th.extracted_power({"sx": [0.0], "sz": [1.0]}, 0.0, 4.5e5)
    assert total[0] == pytest.approx(4.5e5)
    assert q[0] == pytest.approx(4.5e5)


def test_pi_pulse_emits_one_photon(params):
    traj, seq = _pi_pulse_run(params.without_decoherence(), 1)
    _, w, _ = th.extracted_power(traj, seq.rabi_rate(traj.t), 0.0)
    from scipy.integrate import simpson

    assert simpson(w, x=traj.t) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("q0, expected", [(1, 1.0), (0, -1.0)])
def test_work_record_sign(params, q0, expected):
    p = params.without_decoherence()
    traj, seq = _pi_pulse_run(p, q0)
    rec = th.work(traj, p, seq)
    assert rec.work_over_hfs == pytest.approx(expected, abs=1e-3)
    assert rec.balance_residual == pytest.approx(0.0, abs=1e-6)


def test_work_balance_with_dissipation(params):
    traj, seq = _pi_pulse_run(params, 1)
    rec = th.work(traj, params, seq)
    assert abs(rec.balance_residual) <= 1e-6
    # booking only spontaneous emission leaves the thermal absorption out
    assert abs(rec.spont_balance_residual - rec.balance_residual) > 0


def test_work_requires_window_on_grid(params):
    traj, seq = _pi_pulse_run(params, 1)
    seq.markers["extract_start"] = 1.234567e-9
    with pytest.raises(ParameterError):
        th.work(traj, params, seq)


def test_work_record_io(params):
    traj, seq = _pi_pulse_run(params, 1)
    rec = th.work(traj, params, seq, init_label="excited")
    rows = rec.to_csv().splitlines()
    assert rows[0] == "t_s,p_total,p_work,p_heat"
    assert len(rows) == traj.t.size + 1
    d = json.loads(rec.to_json())
    assert d["prep"] == "excited"
    assert d["work_J"] == pytest.approx(rec.work_over_hfs * PLANCK_H * params.f_S)


def test_combine_is_linear(params):
    a, seq = _pi_pulse_run(params, 1)
    b, _ = _pi_pulse_run(params, 0)
    ra, rb = th.work(a, params, seq), th.work(b, params, seq)
    mix = th.WorkRecord.combine([ra, rb], [0.3, 0.7])
    assert mix.work_over_hfs == pytest.approx(0.3 * ra.work_over_hfs + 0.7 * rb.work_over_hfs)
    assert np.allclose(mix.work_power, 0.3 * ra.work_power + 0.7 * rb.work_power)
    with pytest.raises(ParameterError):
        th.WorkRecord.combine([ra, rb], [0.3, 0.3])


# ---------------------------------------------------------------- internal energy and temperatures

def test_internal_energy_values():
    hf = PLANCK_H * F_S
    assert th.internal_energy(np.diag([1.0, 0.0]), F_S) == 0
    assert th.internal_energy(np.eye(2) / 2, F_S) == pytest.approx(hf / 2)
    pe = th.boltzmann_population(0.17, F_S)
    assert th.internal_energy(np.diag([1 - pe, pe]), F_S) == pytest.approx(hf / (1 + np.exp(HF_OVER_K / 0.17)))
    assert HF_OVER_K == pytest.approx(0.3402, abs=2e-4)
    with pytest.raises(ParameterError):
        th.internal_energy(np.eye(3), F_S)


def test_temperature_of_equilibrium_population():
    assert th.temperature_from_population(0.036, F_S) == pytest.approx(0.103, abs=0.003)


def test_population_limits():
    assert th.boltzmann_population(np.inf, F_S) == 0.5
    assert th.boltzmann_population(1e6, F_S) == pytest.approx(0.5, abs=1e-6)
    assert th.boltzmann_population(0.0, F_S) == 0.0
    with pytest.raises(NegativeTemperature):
        th.boltzmann_population(-1.0, F_S)
    with pytest.raises(NegativeTemperature):
        th.temperature_from_population(0.6, F_S)


def test_population_temperature_round_trip():
    T = np.logspace(np.log10(0.05), 1, 60)
    back = np.array([th.temperature_from_population(th.boltzmann_population(x, F_S), F_S) for x in T])
    assert np.max(np.abs(back / T - 1)) <= 1e-10


def test_demon_temperature_from_p1(params):
    T = th.demon_temperature_from_P1(0.007, params.f_D)
    assert 0.059 <= T <= 0.085
    assert th.fock_distribution(T, params.f_D, 5)[1] == pytest.approx(0.007, abs=1e-10)
    assert th.demon_temperature_from_P1(0.0, params.f_D) == 0.0
    # T vanishes only logarithmically as p1 -> 0
    assert th.demon_temperature_from_P1(1e-300, params.f_D) < 1e-3
    with pytest.raises(ParameterError):
        th.demon_temperature_from_P1(0.3, params.f_D)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 0.249))
def test_demon_temperature_consistency(p1):
    f_D = 7.913e9
    T = th.demon_temperature_from_P1(p1, f_D)
    assert th.fock_distribution(T, f_D, 3)[1] == pytest.approx(p1, rel=1e-9)


def test_fock_distribution_ratio(params):
    P = th.fock_distribution(params.T_D0, params.f_D, 10)
    assert P[1] / P[0] == pytest.approx(np.exp(-PLANCK_H * params.f_D / (BOLTZMANN_K * params.T_D0)))


def test_contrast_round_trip():
    c_eq, c_pi = th.contrast_values(0.103, 0.92, F_S)
    assert th.temperature_from_contrast(c_eq, c_pi, 0.92, F_S) == pytest.approx(0.103, abs=1e-6)
    assert c_pi / c_eq == pytest.approx(1 + 0.92 * np.expm1(HF_OVER_K / 0.103), rel=1e-12)
    assert c_pi / c_eq == pytest.approx(25.1, abs=0.3)


def test_contrast_perfect_pulse():
    c_eq, c_pi = th.contrast_values(0.2, 1.0, F_S)
    assert c_pi / c_eq == pytest.approx(np.exp(HF_OVER_K / 0.2), rel=1e-12)


def test_contrast_errors():
    with pytest.raises(InconsistentContrast):
        th.temperature_from_contrast(0.1, 0.05, 0.92, F_S)
    with pytest.raises(InconsistentContrast):
        th.temperature_from_contrast(0.0, 0.05, 0.92, F_S)


def test_landauer():
    assert th.landauer_ratio(BOLTZMANN_K * 0.3 * np.log(2), 0.3) == pytest.approx(1.0)
    # ideal-cycle bound U_S(T) / (k_B T ln 2), evaluated independently
    u = PLANCK_H * F_S / (1 + np.exp(HF_OVER_K / 0.4))
    assert th.landauer_ratio(u, 0.4) == pytest.approx(HF_OVER_K / (1 + np.exp(HF_OVER_K / 0.4)) / (0.4 * np.log(2)), rel=1e-12)
    assert th.landauer_ratio(u, 0.4) == pytest.approx(0.367, abs=0.002)
    with pytest.raises(ParameterError):
        th.landauer_ratio(1.0, 0.0)


# ---------------------------------------------------------------- heterodyne

def test_heterodyne_reflected_drive_only():
    g = th.GainModel(2.5, offset=0.3)
    traj = {"sx": np.zeros(3), "sy": np.zeros(3), "sz": -np.ones(3)}
    i, q, p = th.synthesize_heterodyne(traj, g, 0.0, 4.5e5, beta_in=-7.0)
    assert np.allclose(i, np.sqrt(2.5) * -7.0)
    assert np.allclose(q, 0)
    assert np.allclose(p, 0.3 + 2.5 * 49.0)


def _damped_rabi(omega, gamma):
    from qdemon.device import DeviceParams

    params = DeviceParams(kappa_D=0.0, gamma_1=gamma, gamma_phi=0.0, p_e0=0.0)
    sp = JointSpace(1)
    rho0 = ket_to_dm(sp.basis(0, 0))
    T = 6 * 2 * np.pi / omega
    seq = S.PulseSequence([S.PulseSegment(S.QUBIT_PORT, "square", 0.0, T, omega)], T)
    t = np.linspace(0, T, 6001)
    return evolve(rho0, params, seq, t, tol=1e-10, n_trunc=1), t


def test_heterodyne_quadrature_vanishes():
    omega, gamma = 2 * np.pi * 20e6, 4.5e5
    traj, _ = _damped_rabi(omega, gamma)
    _, q, _ = th.synthesize_heterodyne(traj, th.GainModel(1.0), omega, gamma)
    assert np.max(np.abs(q)) <= 1e-9


@pytest.mark.parametrize("omega_mhz", [10.0, 25.0])
def test_damped_rabi_power_amplitude(omega_mhz):
    from scipy.optimize import curve_fit

    omega, gamma = 2 * np.pi * omega_mhz * 1e6, 2 * np.pi * 0.2e6
    gain = th.GainModel(1.7, omega_inf=2 * np.pi * 400e6)
    traj, t = _damped_rabi(omega, gamma)
    i_rec, _, p_rec = th.synthesize_heterodyne(traj, gain, omega, gamma)
    a_i, a_p = th.rabi_amplitudes(omega, gain, -1.0, gamma)

    def model(t, c, a, lam, w, phi):
        return c + a * np.exp(-lam * t) * np.cos(w * t + phi)

    for rec, expected in ((p_rec, a_p), (i_rec, a_i)):
        guess = (rec.mean(), (rec.max() - rec.min()) / 2, 0.75 * gamma, omega, 0.0)
        popt, _ = curve_fit(model, t, rec, p0=guess, maxfev=20000)
        assert abs(popt[1]) == pytest.approx(float(expected), rel=0.01)


def test_gain_domain():
    g = th.GainModel(1.0, omega_inf=1e8)
    with pytest.raises(GainModelDomainError):
        g.amplitude_gain(2e8)
    with pytest.raises(ParameterError):
        th.GainModel(0.0)
    assert th.GainModel.from_dict(g.to_dict()) == g
    assert th.GainModel.from_dict(th.GainModel(2.0).to_dict()).omega_inf == np.inf


def _gain_samples(model, omegas, gamma, sz0, noise=None, rng=None):
    a_i, a_p = th.rabi_amplitudes(omegas, model, sz0, gamma)
    if noise:
        a_i = a_i * (1 + noise * rng.standard_normal(a_i.shape))
    return np.column_stack([omegas, a_i, a_p])


def test_gain_calibration_round_trip():
    truth = th.GainModel(3.2, omega_inf=2 * np.pi * 150e6)
    omegas = 2 * np.pi * np.linspace(2e6, 30e6, 8)
    fit = th.calibrate_gain(_gain_samples(truth, omegas, 4.5e5, -0.93), -0.93, 4.5e5)
    assert fit.model.g0 == pytest.approx(truth.g0, rel=1e-6)
    assert fit.model.omega_inf == pytest.approx(truth.omega_inf, rel=1e-6)
    assert fit.power_residual_rms <= 1e-6 * np.max(th.rabi_amplitudes(omegas, truth, -0.93, 4.5e5)[1])


def test_gain_calibration_constant_gain():
    truth = th.GainModel(3.2)
    omegas = 2 * np.pi * np.linspace(2e6, 30e6, 8)
    fit = th.calibrate_gain(_gain_samples(truth, omegas, 4.5e5, -0.93), -0.93, 4.5e5)
    assert abs(fit.inv_omega_inf) <= 1e-12
    assert fit.model.g0 == pytest.approx(3.2, rel=1e-9)


def test_gain_calibration_noise():
    truth = th.GainModel(3.2, omega_inf=2 * np.pi * 150e6)
    omegas = 2 * np.pi * np.linspace(2e6, 30e6, 8)
    rng = np.random.default_rng(7)
    g0 = [th.calibrate_gain(_gain_samples(truth, omegas, 4.5e5, -0.93, 0.01, rng), -0.93, 4.5e5).model.g0 for _ in range(100)]
    assert np.max(np.abs(np.array(g0) / truth.g0 - 1)) <= 0.05


def test_gain_calibration_insufficient():
    with pytest.raises(InsufficientData):
        th.calibrate_gain([(1.0, 1.0, 1.0), (2.0, 1.0, 1.0)], -1.0, 1.0)
    with pytest.raises(InsufficientData):
        th.calibrate_gain([(1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (3.0, 1.0, 1.0)], 0.0, 1.0)
    with pytest.raises(InsufficientData):
        th.calibrate_gain(np.ones((3, 2)), -1.0, 1.0)
