import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from switchsim import qlinalg as la
from switchsim.channels import (GeneralizedPauliSpec, PauliRates, apply_channel,
                                depolarizing_family, depolarizing_kraus, generalized_pauli_kraus,
                                identity_family, pauli_family, trace_preservation_error)
from switchsim.errors import ContractViolation, DegenerateBranchError, DomainError
from switchsim.switch import (ClosedFormWarning, ControlSpec, MeasurementSpec, SwitchConfig,
                              SwitchedFamily, closed_form_Cpq, closed_form_Cpq1q2,
                              closed_form_discrepancy, closed_form_switched_map, ideal_switch_trace,
                              reduced_kraus, switch_apply, switch_coefficients, switch_joint_kraus,
                              switched_coherence, switched_coherence_brute_force, verify_statement1,
                              verify_statement2)

from conftest import random_state, seeds

I2, X, Y, Z = la.PAULIS
ONE = la.projector(la.KET1)
P0 = la.projector(la.KET0)
P1 = la.projector(la.KET1)
TWIRL = [s / 2 for s in la.PAULIS]
SQRT3 = np.sqrt(3)

probabilities = st.floats(0, 1)


def configs():
    return st.one_of(
        st.builds(SwitchConfig.quantum_noise, probabilities, st.floats(0.05, 1)),
        st.builds(SwitchConfig.classical_noise, probabilities, st.floats(0.05, 1), probabilities),
        st.just(SwitchConfig.ideal()),
    )


def test_joint_kraus_examples():
    (s,) = switch_joint_kraus([I2], [I2])
    assert np.allclose(s, np.eye(4))
    (s,) = switch_joint_kraus([X], [Z])
    assert np.allclose(s, la.kron(Z @ X, P0) + la.kron(X @ Z, P1))
    ops = switch_joint_kraus(TWIRL, TWIRL)
    assert len(ops) == 16
    assert trace_preservation_error(ops) <= 1e-12
    with pytest.raises(ContractViolation):
        switch_joint_kraus([I2], [np.eye(3)])


def test_switch_apply_identity_channels():
    rho = random_state(11)
    plus, minus = switch_apply([I2], [I2], rho)
    assert np.allclose(plus.state, rho)
    assert plus.probability == pytest.approx(1)
    assert minus.state is None and minus.probability == pytest.approx(0, abs=1e-15)


def test_completely_depolarizing_pair_probability():
    for seed in range(5):
        plus, minus = switch_apply(TWIRL, TWIRL, random_state(seed))
        assert plus.probability == pytest.approx(5 / 8, abs=1e-12)
        assert plus.probability + minus.probability == pytest.approx(1, abs=1e-12)


def test_degenerate_effect_raises():
    with pytest.raises(DegenerateBranchError):
        switch_apply([I2], [I2], random_state(1), ControlSpec.plus(),
                     MeasurementSpec.fourier_povm(0.0, 1.0))


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_closed_form_oracle(gamma):
    rng = np.random.default_rng(int(gamma * 10))
    rates = PauliRates.uniform(gamma)
    for _ in range(50):
        rho = la.random_density_matrix(2, rng)
        t = rng.uniform(0, 5 / gamma)
        ks = depolarizing_kraus(t, rates)
        out, _ = switch_apply(ks, ks, rho)
        assert np.max(np.abs(out.state - closed_form_switched_map(rho, t, gamma))) <= 1e-10


def test_closed_form_switched_map_examples():
    rho = random_state(3)
    assert np.allclose(closed_form_switched_map(rho, 0.0, 1.0), rho)
    assert np.allclose(closed_form_switched_map(ONE, 60.0, 1.0), np.diag([0.4, 0.6]))
    t_minus = np.log(3 + 2 * SQRT3) / 4
    assert switched_coherence(t_minus, 1.0) == pytest.approx((2 * SQRT3 - 3) / 3, abs=1e-14)
    assert switched_coherence(t_minus, 1.0) == pytest.approx(0.1547005383792515, abs=1e-14)
    with pytest.raises(DomainError):
        closed_form_switched_map(rho, 0.1, 0.0)


def test_brute_force_large_time_limit():
    fam = depolarizing_family(PauliRates.uniform(1.0))
    out = SwitchedFamily(fam, fam).evolve(60.0, ONE)
    assert np.allclose(out, np.diag([0.4, 0.6]), atol=1e-12)


@given(seeds, seeds, configs())
def test_probabilities_sum_to_one(s1, s2, cfg):
    spec = GeneralizedPauliSpec.random(2, np.random.default_rng(s1))
    ks = generalized_pauli_kraus(spec)
    try:
        plus, minus = switch_apply(ks, ks, random_state(s2), cfg.control, cfg.measurement)
    except DegenerateBranchError:
        return
    assert 0 <= plus.probability <= 1 + 1e-10
    assert plus.probability + minus.probability == pytest.approx(1, abs=1e-10)


@given(seeds, st.floats(0, 3), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), configs())
def test_reduced_kraus_matches_brute_force(seed, t, g1, g2, g3, cfg):
    k1 = pauli_family(PauliRates(g1, g2, g3))(t)
    k2 = depolarizing_kraus(t / 2, PauliRates.uniform(0.7))
    rho = random_state(seed)
    try:
        plus, _ = switch_apply(k1, k2, rho, cfg.control, cfg.measurement)
    except DegenerateBranchError:
        return
    ops = reduced_kraus(k1, k2, cfg.control, cfg.measurement)
    numerator = sum(k @ rho @ la.dagger(k) for k in ops)
    assert np.max(np.abs(numerator - plus.probability * plus.state)) <= 1e-10
    total = sum(la.dagger(k) @ k for k in ops)
    assert la.hermitian_eigenvalues(np.eye(2) - total)[0] >= -1e-10


def test_reduced_kraus_examples():
    (k,) = reduced_kraus([I2], [I2])
    assert np.allclose(k, I2)
    # commuting Kraus operators: the ideal reduced set is trace preserving
    ks = [np.sqrt(0.7) * I2, np.sqrt(0.3) * Z]
    assert trace_preservation_error(reduced_kraus(ks, ks)) <= 1e-14
    chis = switch_coefficients(ControlSpec.plus(), MeasurementSpec.plus().effect())
    assert np.allclose(chis, [(0.5, 0.5)], atol=1e-15)


def test_ideal_reduced_kraus_is_anticommutator():
    a, b = depolarizing_kraus(0.3, PauliRates.uniform(1.0)), TWIRL
    expected = [(ki @ kj + kj @ ki) / 2 for ki in a for kj in b]
    got = reduced_kraus(a, b)
    assert np.allclose(np.array(got), np.array(expected))


def test_definite_order_limits():
    a, b = [X], [np.diag([1, 1j])]
    rho = random_state(7)
    first, _ = switch_apply(a, b, rho, ControlSpec.pure_computational(1.0),
                            MeasurementSpec.pure_computational(1.0))
    assert np.allclose(first.state, apply_channel(b, apply_channel(a, rho)))
    second, _ = switch_apply(a, b, rho, ControlSpec.pure_computational(0.0),
                             MeasurementSpec.pure_computational(0.0))
    assert np.allclose(second.state, apply_channel(a, apply_channel(b, rho)))


def test_cpq_reference_form():
    g = np.exp(4.0)
    assert closed_form_Cpq(1.0, 1.0, 0.5, 0.5) == pytest.approx((g * g - 2 * g + 9) / (g * g + 6 * g - 3))
    assert closed_form_Cpq(1.0, 1.0, 0.5, 0.5) != pytest.approx(switched_coherence(1.0, 1.0))
    # p = q = 1 is a definite order: N o N decays as e^{-8 gamma t}
    for t in (0.2, 0.7):
        brute = switched_coherence_brute_force(t, 1.0, SwitchConfig.quantum_noise(1, 1))
        assert brute == pytest.approx(np.exp(-8 * t), abs=1e-12)
        assert closed_form_Cpq(t, 1.0, 1.0, 1.0) == pytest.approx(brute, abs=1e-12)


def test_cpq_on_figure_parameters_is_finite():
    for t in np.linspace(0, 5, 51):
        assert np.isfinite(closed_form_Cpq(t, 1.0, 0.4, 1.0))
        assert np.isfinite(closed_form_Cpq1q2(t, 1.0, 0.5, 0.5, 0.5))


def test_cpq1q2_reduces_to_ideal():
    for t in np.linspace(0, 5, 501):
        assert closed_form_Cpq1q2(t, 1.0, 1.0, 1.0, 0.0) == pytest.approx(switched_coherence(t, 1.0),
                                                                          abs=1e-12)


def test_equal_povm_weights_give_definite_average():
    cfg = SwitchConfig.classical_noise(0.3, 0.6, 0.6)
    for t in (0.1, 0.9):
        assert switched_coherence_brute_force(t, 1.0, cfg) == pytest.approx(np.exp(-8 * t), abs=1e-12)


def test_discrepancy_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert closed_form_discrepancy(0.4, 1.0, SwitchConfig.quantum_noise(0.4, 1.0)) <= 1e-10
        assert closed_form_discrepancy(0.4, 1.0, SwitchConfig.classical_noise(1, 1, 0)) <= 1e-10
    with pytest.warns(ClosedFormWarning) as record:
        gap = closed_form_discrepancy(0.4, 1.0, SwitchConfig.quantum_noise(0.5, 0.5))
    assert gap > 0.1
    assert record[0].message.brute == pytest.approx(switched_coherence(0.4, 1.0))
    with pytest.warns(ClosedFormWarning):
        closed_form_discrepancy(0.4, 1.0, SwitchConfig.classical_noise(0.8, 0.1, 0.9))


def test_statement1_examples():
    assert verify_statement1(GeneralizedPauliSpec.uniform(2)) <= 1e-12
    rng = np.random.default_rng(5)
    assert verify_statement1(GeneralizedPauliSpec.random(3, rng)) <= 1e-10
    assert verify_statement1(GeneralizedPauliSpec.random(2, rng), ControlSpec.pure_computational(0.3),
                             MeasurementSpec.pure_computational(0.8)) <= 1e-10


@given(seeds, st.integers(2, 5), configs())
def test_statement1_property(seed, d, cfg):
    spec = GeneralizedPauliSpec.random(d, np.random.default_rng(seed))
    try:
        assert verify_statement1(spec, cfg.control, cfg.measurement) <= 1e-10
    except DegenerateBranchError:
        pass


def test_statement2_examples():
    rng = np.random.default_rng(9)
    states = [la.random_density_matrix(2, rng) for _ in range(6)]
    check = verify_statement2(GeneralizedPauliSpec.uniform(2), states)
    assert check.spread <= 1e-12
    assert check.traces[0] == pytest.approx(5 / 8, abs=1e-12)
    assert check.analytic == pytest.approx(5 / 8, abs=1e-15)
    ident = verify_statement2(GeneralizedPauliSpec.identity(2), states)
    assert ident.traces == pytest.approx(np.ones(6))
    spec3 = GeneralizedPauliSpec.random(3, rng)
    states3 = [la.random_density_matrix(3, rng) for _ in range(10)]
    check3 = verify_statement2(spec3, states3)
    assert check3.spread <= 1e-12
    assert check3.traces[0] == pytest.approx(ideal_switch_trace(spec3), abs=1e-12)
    with pytest.raises(ContractViolation):
        verify_statement2(spec3, states3[:1])


def test_switched_family_superoperator_matches_evolve():
    fam = pauli_family(PauliRates(0.2, 0.9, 0.4))
    sw = SwitchedFamily(fam, depolarizing_family(PauliRates.uniform(0.5)),
                        SwitchConfig.quantum_noise(0.3, 0.8))
    rho = random_state(21)
    for t in (0.0, 0.4, 2.0):
        assert np.allclose(la.apply_superoperator(sw.superoperator(t), rho), sw.evolve(t, rho),
                           atol=1e-12)


def test_switched_family_complement_branch():
    fam = depolarizing_family(PauliRates.uniform(1.0))
    minus = SwitchedFamily(fam, fam, branch="complement")
    rho = random_state(2)
    _, expected = switch_apply(fam(0.5), fam(0.5), rho)
    assert np.allclose(minus.evolve(0.5, rho), expected.state)
    with pytest.raises(DomainError):
        SwitchedFamily(fam, fam, branch="sideways")


def test_identity_family_is_switch_invariant():
    fam = identity_family()
    rho = random_state(4)
    assert np.allclose(SwitchedFamily(fam, fam).evolve(3.0, rho), rho)
