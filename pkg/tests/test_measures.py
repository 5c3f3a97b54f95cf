import numpy as np
import pytest
from hypothesis import given, strategies as st

from switchsim import qlinalg as la
from switchsim.channels import PauliRates, depolarizing_family, identity_family
from switchsim.errors import ConvergenceError, DomainError, RootError
from switchsim.lindblad import gamma_S_closed_form
from switchsim.measures import (blp_measure, characteristic_time, characteristic_time_closed_form,
                                info_loss, ns_for_rates, qsi_series, qsm, qsm_blp_bridge,
                                rhp_g, rhp_measure, switched_depolarizing, sweep_ns_surface,
                                time_avg_equality_check, time_average, time_averaged_state)
from switchsim.switch import SwitchConfig, switched_coherence

from conftest import random_state, seeds

ONE = la.projector(la.KET1)
PLUS = la.projector(la.KET_PLUS)
TAU = la.maximally_mixed(2)
SQRT3 = np.sqrt(3)

# frozen oracle values
T_MINUS_1 = 0.46656601031471789   # ln(3 + 2 sqrt 3) / 4
N_INF = 0.022649730810374235       # 1/10 - (2 sqrt 3 - 3)/6
N_S = 0.38523919323715677          # (3/2) ln(3 / (5 (2 sqrt 3 - 3)))
D_T_MINUS = 0.077350269189625765   # C(T-)/2 = (2 sqrt 3 - 3)/6


def test_frozen_oracles_match_closed_expressions():
    assert T_MINUS_1 == pytest.approx(np.log(3 + 2 * SQRT3) / 4, abs=1e-16)
    assert N_INF == pytest.approx(0.1 - (2 * SQRT3 - 3) / 6, abs=1e-16)
    assert N_S == pytest.approx(1.5 * np.log(3 / (5 * (2 * SQRT3 - 3))), abs=1e-15)
    assert D_T_MINUS == pytest.approx(switched_coherence(T_MINUS_1, 1.0) / 2, abs=1e-15)


def test_info_loss_examples():
    rho = random_state(1)
    assert info_loss(rho, TAU, rho, TAU) == 0
    assert info_loss(ONE, TAU, TAU, TAU) == pytest.approx(0.5)
    dep = depolarizing_family(PauliRates.uniform(1.0))
    for t in (0.1, 0.6):
        assert info_loss(ONE, TAU, dep.evolve(t, ONE), TAU) == pytest.approx((1 - np.exp(-4 * t)) / 2)


def test_qsm_examples():
    assert qsm(ONE, 0.0, 1.0) == pytest.approx(0, abs=1e-15)
    for t in (0.2, 0.9, 3.0):
        expected = abs(switched_coherence(t, 1.0) - np.exp(-4 * t)) / 2
        assert qsm(ONE, t, 1.0) == pytest.approx(expected, abs=1e-12)
    ident = identity_family()
    switch_ident = lambda t, r: switched_depolarizing(1.0).evolve(0.0, r)
    assert qsm(ONE, 2.0, switch_map=switch_ident, ergodic_map=ident.evolve) == pytest.approx(0, abs=1e-15)


def test_qsi_ideal_shape():
    ts = np.linspace(0, 5, 501)
    dev = np.array([r.deviation for r in qsi_series(ONE, 1.0, ts)])
    x = np.exp(-4 * ts)
    c = np.array([switched_coherence(t, 1.0) for t in ts])
    assert np.max(np.abs(dev - np.maximum(0, x - c))) <= 1e-10
    assert dev[0] == 0
    assert dev.max() > 1e-3
    assert dev[-1] <= 1e-6
    # once C overtakes the plain decay the deviation is exactly zero
    assert np.all(dev[c >= x] <= 1e-15)


CONFIGS = [SwitchConfig.ideal(),
           SwitchConfig.quantum_noise(0.5, 0.5), SwitchConfig.quantum_noise(0.4, 1.0),
           SwitchConfig.quantum_noise(0.8, 0.9),
           SwitchConfig.classical_noise(1, 1, 0), SwitchConfig.classical_noise(0.5, 0.5, 0.5),
           SwitchConfig.classical_noise(0.8, 0.1, 0.9)]


@pytest.mark.parametrize("config", CONFIGS, ids=str)
@pytest.mark.parametrize("gamma", [0.5, 2.0])
def test_qsi_never_negative(config, gamma):
    ts = np.linspace(0, 5 / gamma, 60)
    for rho in (ONE, PLUS, random_state(31)):
        assert min(r.deviation for r in qsi_series(rho, gamma, ts, config)) >= -1e-10


@given(seeds, st.floats(0, 4), st.floats(0.1, 3))
def test_qsi_property(seed, t, gamma):
    (rec,) = qsi_series(random_state(seed), gamma, [t])
    assert rec.deviation >= -1e-10


def test_time_average_examples():
    ident = identity_family()
    rho = random_state(3)
    assert np.allclose(time_averaged_state(ident.evolve, rho, 10.0), rho)
    sw = switched_depolarizing(1.0)
    avg = time_averaged_state(sw.evolve, ONE, 500.0)
    assert np.allclose(avg, np.diag([0.4, 0.6]), atol=2e-3)
    with pytest.raises(DomainError):
        time_average(ident.evolve, rho, 0.0)


def test_time_average_not_converged():
    sw = switched_depolarizing(1.0)
    with pytest.raises(ConvergenceError) as info:
        time_averaged_state(sw.evolve, ONE, 1.0, tol=1e-6)
    assert info.value.residual > 1e-6


def test_time_average_equality():
    check = time_avg_equality_check(ONE, 1.0, 500.0)
    assert check.info_loss_switch == pytest.approx(0.4, abs=1e-3)
    assert check.qsm == pytest.approx(0.1, abs=1e-3)
    assert check.distance == 0.5
    assert check.residual <= 1e-3
    r50 = time_avg_equality_check(ONE, 1.0, 50.0).residual
    r100 = time_avg_equality_check(ONE, 1.0, 100.0).residual
    assert r50 <= 1e-2 and r100 < r50
    fixed = time_avg_equality_check(TAU, 1.0, 50.0)
    assert fixed.info_loss_switch == pytest.approx(0, abs=1e-14)
    assert fixed.qsm == pytest.approx(0, abs=1e-14)
    assert fixed.residual <= 1e-14


@pytest.mark.parametrize("gamma", [0.25, 0.5, 1.0, 2.0, 4.0])
def test_characteristic_time(gamma):
    t = characteristic_time(gamma)
    assert t == pytest.approx(characteristic_time_closed_form(gamma), rel=1e-10)
    assert t == pytest.approx(T_MINUS_1 / gamma, rel=1e-10)
    g = np.exp(4 * gamma * t)
    assert g == pytest.approx(3 + 2 * SQRT3, rel=1e-9)
    assert g * g - 6 * g - 3 == pytest.approx(0, abs=1e-7)


def test_characteristic_time_without_sign_change():
    with pytest.raises(RootError):
        characteristic_time(1.0, rate=lambda t: 1.0 + t)
    with pytest.raises(DomainError):
        characteristic_time(0.0)


def test_blp_ideal():
    res = blp_measure(ONE, 1.0)
    assert res.n_inf == pytest.approx(N_INF, abs=1e-8)
    assert res.quadrature.value == pytest.approx(N_INF, abs=1e-6)
    assert res.t_minus == pytest.approx(T_MINUS_1, rel=1e-8)
    assert res.d_t_minus == pytest.approx(D_T_MINUS, abs=1e-10)
    assert res.d_infinity == pytest.approx(0.1, abs=1e-12)


def test_blp_trivial_cases():
    assert blp_measure(TAU, 1.0).n_inf == 0
    plain = depolarizing_family(PauliRates.uniform(1.0))
    res = blp_measure(ONE, 1.0, evolve=plain.evolve)
    assert res.n_inf == 0 and res.quadrature.value == 0


def test_blp_unsettled_asymptote():
    # a contraction that keeps oscillating never settles
    def breathing(t, rho):
        return TAU + 0.5 * (1 + np.cos(t)) * (rho - TAU)

    with pytest.raises(ConvergenceError):
        blp_measure(ONE, 1.0, evolve=breathing)


def test_rhp_g_matches_six_gamma():
    sw = switched_depolarizing(1.0)
    for t in np.linspace(0.5, 5, 10):
        assert rhp_g(sw.superoperator, t) == pytest.approx(6 * abs(gamma_S_closed_form(t, 1.0)),
                                                           abs=1e-4)
    for t in np.linspace(0, T_MINUS_1 - 1e-3, 10):
        assert rhp_g(sw.superoperator, t) <= 1e-6
    assert rhp_g(sw.superoperator, T_MINUS_1) <= 1e-6


def test_rhp_g_plain_channel_is_zero():
    plain = depolarizing_family(PauliRates.uniform(1.0))
    for t in (0.0, 0.5, 2.0):
        assert rhp_g(plain.superoperator, t) <= 1e-8


@pytest.mark.parametrize("gamma", [0.5, 2.0])
def test_rhp_measure_value(gamma):
    res = rhp_measure(gamma)
    assert res.n_s == pytest.approx(N_S, abs=1e-6)
    assert res.normalized == pytest.approx(N_S / (1 + N_S), abs=1e-6)
    assert res.t_minus == pytest.approx(T_MINUS_1 / gamma, rel=1e-8)


def test_rhp_plain_channel_is_markovian():
    plain = depolarizing_family(PauliRates.uniform(1.0))
    res = rhp_measure(map_at=plain.superoperator, scale=1.0)
    assert res.n_s == 0 and res.windows == ()
    # e^{-4t} drops below the conditioning limit well before t = 10
    assert 5 < res.truncated_at < 10


def test_bridge_examples():
    b = qsm_blp_bridge(N_INF, D_T_MINUS)
    assert b.q_s_infinity == pytest.approx(0.1, abs=1e-15)
    assert b.normalized == pytest.approx(1 / 11, abs=1e-15)
    assert b.blp_form == pytest.approx(b.normalized, abs=1e-15)
    zero = qsm_blp_bridge(0.0, 0.0)
    assert (zero.q_s_infinity, zero.normalized) == (0.0, 0.0)
    big = qsm_blp_bridge(1e9, 0.3)
    assert big.blp_form == pytest.approx(1e9 / (1 + 1e9), abs=1e-8)
    with pytest.raises(DomainError):
        qsm_blp_bridge(-0.1, 0.0)


@given(st.floats(0, 10), st.floats(0, 1))
def test_bridge_forms_agree(n_inf, d):
    b = qsm_blp_bridge(n_inf, d)
    assert b.blp_form == pytest.approx(b.normalized, abs=1e-12)


def test_ns_for_symmetric_and_trivial_rates():
    assert ns_for_rates(PauliRates(0.0, 0.0, 0.0)).normalized == 0
    res = ns_for_rates(PauliRates.uniform(1.0))
    assert res.normalized == pytest.approx(N_S / (1 + N_S), abs=1e-6)


def test_sweep_records_cell_errors():
    sweep = sweep_ns_surface([0.0, 1.0], [0.0], 0.0, grid_points=50, max_doublings=0)
    assert sweep.normalized[0, 0] == 0
    # the (1, 0, 0) cell never settles within a single horizon
    assert (1, 0) in sweep.errors and np.isnan(sweep.normalized[1, 0])
    with pytest.raises(DomainError):
        sweep_ns_surface([np.inf], [0.0], 0.0)
