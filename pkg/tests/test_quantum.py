import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainedbell.quantum import (
    EntangledPairState,
    NotPureSubsystemError,
    bob_marginal,
    decorrelation_check,
    joint_probability,
    joint_table,
    marginal,
    povm_element,
)

from oracles import amplitude_probability

R = 1 / math.sqrt(2)
angles = st.floats(0, 2 * math.pi, allow_nan=False)
alphas = st.floats(0, 1, allow_nan=False)


def test_povm_sigma_z_projector():
    np.testing.assert_allclose(povm_element(0.0, 0), np.diag([1, 0]), atol=1e-15)


def test_povm_completeness_at_zero():
    np.testing.assert_allclose(povm_element(0.0, 0) + povm_element(0.0, 1), np.eye(2), atol=1e-15)


def test_povm_x_axis():
    # (1 + sigma_x) / 2 by hand
    np.testing.assert_allclose(povm_element(math.pi / 2, 0), 0.5 * np.array([[1, 1], [1, 1]]), atol=1e-15)


def test_povm_completeness_grid():
    for theta in np.linspace(0, 2 * math.pi, 100):
        np.testing.assert_allclose(povm_element(theta, 0) + povm_element(theta, 1), np.eye(2), atol=1e-12)


@given(angles, st.sampled_from([0, 1]))
def test_povm_is_rank_one_projector(theta, outcome):
    E = povm_element(theta, outcome)
    np.testing.assert_allclose(E @ E, E, atol=1e-12)
    np.testing.assert_allclose(E, E.conj().T, atol=1e-15)
    assert abs(np.trace(E) - 1) < 1e-12


def test_povm_rejects_bad_outcome():
    with pytest.raises(ValueError):
        povm_element(0.1, 2)


def test_joint_probability_examples():
    s = EntangledPairState(R)
    assert joint_probability(s, 0.7, 0.7, 0, 1) == pytest.approx(0, abs=1e-12)
    assert joint_probability(s, 0.0, math.pi, 0, 0) == pytest.approx(0, abs=1e-12)
    assert joint_probability(s, 0.0, math.pi / 2, 0, 0) == pytest.approx(0.25, abs=1e-12)


@given(alphas, angles, angles, st.sampled_from([0, 1]), st.sampled_from([0, 1]))
def test_trace_matches_amplitude_oracle(alpha, a, b, x, y):
    p = joint_probability(EntangledPairState(alpha), a, b, x, y)
    assert p == pytest.approx(amplitude_probability(alpha, a, b, x, y), abs=1e-12)


def test_normalization_and_no_signalling_grid():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        s = EntangledPairState(rng.random())
        a, b, b2 = rng.uniform(0, 2 * math.pi, 3)
        t = joint_table(s, a, b)
        assert abs(t.sum() - 1) < 1e-12
        assert t.min() >= 0
        for x in (0, 1):
            assert abs(marginal(s, a, b, x) - marginal(s, a, b2, x)) < 1e-12
            assert abs(bob_marginal(s, a, b, x) - bob_marginal(s, b2, b, x)) < 1e-12


def test_marginal_examples():
    assert marginal(EntangledPairState(R), 0.3, 1.1, 0) == pytest.approx(0.5, abs=1e-12)
    assert marginal(EntangledPairState(1.0), 0.0, 2.3, 0) == pytest.approx(1.0, abs=1e-12)
    assert marginal(EntangledPairState(0.8), 0.0, 2.3, 0) == pytest.approx(0.64, abs=1e-12)


@given(angles, angles)
def test_maximally_entangled_marginals_uniform(a, b):
    assert marginal(EntangledPairState(R), a, b, 0) == pytest.approx(0.5, abs=1e-12)


@given(angles)
def test_equal_angles_perfectly_correlated(theta):
    s = EntangledPairState(R)
    unequal = joint_probability(s, theta, theta, 0, 1) + joint_probability(s, theta, theta, 1, 0)
    assert unequal < 1e-12


@given(alphas)
@settings(max_examples=50)
def test_density_matrix_is_a_pure_state(alpha):
    rho = EntangledPairState(alpha).density_matrix()
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-15)
    ev = np.linalg.eigvalsh(rho)
    assert ev.min() >= -1e-12
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.sum(ev > 1e-9) == 1


def test_global_phase_is_unobservable():
    s = EntangledPairState(0.6)
    rho_phase = np.outer(np.exp(1j * 0.9) * s.ket(), (np.exp(1j * 0.9) * s.ket()).conj())
    np.testing.assert_allclose(rho_phase, s.density_matrix(), atol=1e-15)


def test_reduced_state_of_product_is_pure():
    red = EntangledPairState(1.0).reduced_state(0)
    np.testing.assert_allclose(red, np.diag([1, 0]), atol=1e-15)
    red = EntangledPairState(0.8).reduced_state(1)
    np.testing.assert_allclose(red, np.diag([0.64, 0.36]), atol=1e-12)


def test_decorrelation_examples():
    assert decorrelation_check(EntangledPairState(1.0), 0.2, 0.9)
    assert decorrelation_check(EntangledPairState(0.0), 1.0, 2.0)
    with pytest.raises(NotPureSubsystemError, match="subsystem not pure"):
        decorrelation_check(EntangledPairState(R), 0.1, 0.2)


@given(angles, angles)
def test_decorrelation_holds_for_product_states(a, b):
    assert decorrelation_check(EntangledPairState(1.0), a, b)
    assert decorrelation_check(EntangledPairState(0.0), a, b)


@pytest.mark.parametrize("alpha", [-0.1, 1.2, float("nan")])
def test_state_rejects_bad_alpha(alpha):
    with pytest.raises(ValueError):
        EntangledPairState(alpha)
