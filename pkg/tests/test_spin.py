"""
Unit tests for simulator/spin.py
"""
import numpy as np
import pytest

from simulator.exceptions import InvalidParameterError, NonUnitProbability
from simulator.oracle import trace_expectation, trace_second_moment
from simulator.spin import (
    OUTCOMES,
    SpinAxis,
    eigenbasis,
    expectation,
    normalize_probabilities,
    probabilities,
    second_moment,
    spin_operator,
)
from simulator.state import DensityMatrix3, density_matrix

AXES = (SpinAxis.X, SpinAxis.Y, SpinAxis.Z)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


@pytest.mark.unit
class TestOperators:
    """Tests for the spin-1 matrices"""

    @pytest.mark.parametrize('first,second,third', [('X', 'Y', 'Z'), ('Y', 'Z', 'X'), ('Z', 'X', 'Y')])
    def test_commutation_relations(self, first, second, third):
        lhs = commutator(spin_operator(first), spin_operator(second))
        assert np.allclose(lhs, 1j * spin_operator(third), atol=1e-15)

    @pytest.mark.parametrize('axis', AXES)
    def test_hermitian(self, axis):
        op = spin_operator(axis)
        assert np.array_equal(op, op.conj().T)

    def test_casimir(self):
        total = sum(spin_operator(axis) @ spin_operator(axis) for axis in AXES)
        assert np.allclose(total, 2 * np.eye(3))

    def test_operators_read_only(self):
        with pytest.raises(ValueError):
            spin_operator('X')[0, 0] = 1.0

    def test_lowercase_axis(self):
        assert spin_operator('z') is spin_operator(SpinAxis.Z)

    def test_unknown_axis(self):
        with pytest.raises(InvalidParameterError, match="axis"):
            spin_operator('W')


@pytest.mark.unit
class TestEigenbasis:
    """Tests for eigenvectors in outcome order"""

    @pytest.mark.parametrize('axis', AXES)
    def test_eigen_equation(self, axis):
        op = spin_operator(axis)
        basis = eigenbasis(axis)
        for outcome in OUTCOMES:
            v = basis.vector(outcome)
            assert np.allclose(op @ v, outcome * v, atol=1e-15)

    @pytest.mark.parametrize('axis', AXES)
    def test_orthonormal(self, axis):
        v = eigenbasis(axis).vectors
        assert np.allclose(v.conj() @ v.T, np.eye(3), atol=1e-15)

    @pytest.mark.parametrize('axis', AXES)
    def test_projectors_resolve_identity(self, axis):
        assert np.allclose(eigenbasis(axis).projectors.sum(axis=0), np.eye(3))

    def test_bad_outcome(self):
        with pytest.raises(InvalidParameterError, match="outcome"):
            eigenbasis('X').vector(2)


@pytest.mark.unit
class TestMoments:
    """Tests for closed-form expectations and second moments"""

    def test_sz_eigenstate(self, sz_plus_amplitudes):
        assert expectation(sz_plus_amplitudes, 'Z') == pytest.approx(1.0)
        assert expectation(sz_plus_amplitudes, 'X') == pytest.approx(0.0)
        assert second_moment(sz_plus_amplitudes, 'Z') == pytest.approx(1.0)

    def test_ground_state(self, ground_amplitudes):
        for axis in AXES:
            assert expectation(ground_amplitudes, axis) == 0.0
        assert second_moment(ground_amplitudes, 'X') == 0.0
        assert second_moment(ground_amplitudes, 'Y') == 1.0
        assert second_moment(ground_amplitudes, 'Z') == 1.0

    def test_s1_start(self, make_amplitudes):
        a = make_amplitudes(2 ** -0.5, 0.0, 2 ** -0.5)
        assert second_moment(a, 'X') == pytest.approx(0.5)
        assert second_moment(a, 'Y') == pytest.approx(1.0)
        assert second_moment(a, 'Z') == pytest.approx(0.5)

    def test_scalar_returns_float(self, sz_plus_amplitudes):
        assert isinstance(expectation(sz_plus_amplitudes, 'Z'), float)

    @pytest.mark.parametrize('axis', AXES)
    def test_matches_trace_oracle(self, random_states, axis):
        rho = density_matrix(random_states)
        assert np.max(np.abs(expectation(random_states, axis) - trace_expectation(rho, axis))) < 1e-12
        assert np.max(np.abs(second_moment(random_states, axis) - trace_second_moment(rho, axis))) < 1e-12

    def test_sum_of_second_moments(self, random_states):
        total = sum(second_moment(random_states, axis) for axis in AXES)
        # Tr(rho (Sx^2 + Sy^2 + Sz^2)) = 2
        assert np.allclose(total, 2.0, atol=1e-12)


@pytest.mark.unit
class TestProbabilities:
    """Tests for projection probabilities"""

    def test_ground_state(self):
        rho = DensityMatrix3(np.diag([1.0, 0.0, 0.0]))
        assert np.allclose(probabilities(rho, 'X'), [0.0, 1.0, 0.0])
        assert np.allclose(probabilities(rho, 'Y'), [0.5, 0.0, 0.5])
        assert np.allclose(probabilities(rho, 'Z'), [0.5, 0.0, 0.5])

    def test_eigenstate(self, sz_plus_amplitudes):
        rho = density_matrix(sz_plus_amplitudes)
        assert np.allclose(probabilities(rho, 'Z'), [1.0, 0.0, 0.0], atol=1e-15)

    def test_stack_shape(self, random_states):
        probs = probabilities(density_matrix(random_states), 'Y')
        assert probs.shape == (len(random_states), 3)
        assert np.allclose(probs.sum(axis=-1), 1.0, atol=1e-12)

    def test_unnormalized_input_rejected(self):
        rho = DensityMatrix3(np.eye(3) / 2, validate=False)
        with pytest.raises(NonUnitProbability):
            probabilities(rho, 'X')

    def test_roundoff_is_renormalized(self):
        probs = normalize_probabilities(np.array([0.5 + 5e-11, 0.25, 0.25]))
        assert probs.sum() == pytest.approx(1.0, abs=1e-15)

    def test_negative_roundoff_clipped(self):
        probs = normalize_probabilities(np.array([-1e-14, 0.5, 0.5]))
        assert probs[0] == 0.0

    def test_reports_time_of_failure(self):
        probs = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.5]])
        with pytest.raises(NonUnitProbability) as exc_info:
            normalize_probabilities(probs, np.array([0.0, 3.0]))
        assert exc_info.value.t == 3.0
