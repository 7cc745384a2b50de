"""
Unit tests for simulator/oracle.py
Tests the RK4 pseudomode integration, direct projections and the bound search
"""
import math

import numpy as np
import pytest

import simulator.oracle as oracle
from simulator.exceptions import BoundViolation, InvalidParameterError, StepTooLarge
from simulator.model import SystemParams, propagator_g
from simulator.oracle import (
    OdeConfig,
    bound_search,
    convergence_ratio,
    ode_error,
    ode_propagator,
    projection_probabilities,
    pseudomode_coupling,
    random_reachable_states,
    stack_states,
)
from simulator.spin import probabilities
from simulator.squeezing import ENTROPIC_BOUND
from simulator.state import DensityMatrix3, density_matrix


@pytest.mark.unit
class TestOdeConfig:
    """Tests for integration settings"""

    def test_defaults(self):
        config = OdeConfig()
        assert config.dt == 1e-3
        assert config.t_max == 20.0

    @pytest.mark.parametrize('dt,t_max', [(0.0, 1.0), (-1e-3, 1.0), (1e-3, 0.0), (2.0, 1.0)])
    def test_invalid(self, dt, t_max):
        with pytest.raises(InvalidParameterError):
            OdeConfig(dt=dt, t_max=t_max)


@pytest.mark.unit
class TestPseudomode:
    """Tests for the RK4 propagator"""

    def test_coupling(self, strong_params):
        # g^2 = gamma0 (1 + theta) kappa / 2
        assert pseudomode_coupling(strong_params, 1) ** 2 == pytest.approx(7.5)

    def test_known_value(self, strong_params):
        d = ode_propagator(strong_params, 1, [1.0])
        assert d[0] == pytest.approx(-0.4975199, abs=1e-6)

    def test_matches_closed_form(self, detuned_params):
        config = OdeConfig(dt=1e-3, t_max=10.0)
        for sign in (1, -1):
            assert ode_error(detuned_params, sign, config) < 1e-6

    def test_uncoupled_channel_constant(self):
        params = SystemParams(kappa=1.0, gamma0=10.0, theta=1.0, delta=5.0)
        grid = np.linspace(0.0, 5.0, 51)
        assert np.all(ode_propagator(params, -1, grid) == 1.0)

    def test_free_atom(self):
        grid = np.linspace(0.0, 2.0, 5)
        assert np.all(ode_propagator(SystemParams(), 1, grid) == 1.0)

    def test_uneven_grid(self, strong_params):
        grid = np.array([0.0, 0.0015, 0.4, 0.4, 2.0])
        numeric = ode_propagator(strong_params, 1, grid)
        assert np.max(np.abs(numeric - propagator_g(strong_params, 1, grid))) < 1e-6

    def test_decreasing_grid_rejected(self, strong_params):
        with pytest.raises(InvalidParameterError, match="non-decreasing"):
            ode_propagator(strong_params, 1, [0.0, 1.0, 0.5])

    def test_step_too_large(self, strong_params):
        with pytest.raises(StepTooLarge) as exc_info:
            ode_propagator(strong_params, 1, [1.0], OdeConfig(dt=0.05, t_max=1.0))
        assert exc_info.value.dt == 0.05

    def test_fourth_order_convergence(self, detuned_params):
        ratio = convergence_ratio(detuned_params, 1, dt=1e-2, t_max=20.0)
        assert 12.0 <= ratio <= 20.0


@pytest.mark.unit
class TestProjections:
    """Tests for the direct projection path"""

    def test_ground_state(self):
        rho = DensityMatrix3(np.diag([1.0, 0.0, 0.0]))
        assert np.allclose(projection_probabilities(rho, 'X'), [0.0, 1.0, 0.0])

    @pytest.mark.parametrize('axis', ['X', 'Y', 'Z'])
    def test_agrees_with_trace_form(self, random_states, axis):
        rho = density_matrix(random_states)
        assert np.max(np.abs(projection_probabilities(rho, axis) - probabilities(rho, axis))) < 1e-12


@pytest.mark.unit
class TestRandomStates:
    """Tests for reproducible random draws"""

    def test_reproducible(self):
        first = stack_states(random_reachable_states(20, seed=3))
        second = stack_states(random_reachable_states(20, seed=3))
        assert np.array_equal(first.dA, second.dA)
        assert np.array_equal(first.t, second.t)

    def test_seeds_differ(self):
        first = stack_states(random_reachable_states(5, seed=1))
        second = stack_states(random_reachable_states(5, seed=2))
        assert not np.array_equal(first.dA, second.dA)

    def test_physical(self, random_state_list):
        for state in random_state_list:
            assert 0.0 <= state.amplitudes.bath_weight <= 1.0
            assert 0.0 <= state.t <= 50.0

    def test_count_validated(self):
        with pytest.raises(InvalidParameterError):
            random_reachable_states(0, seed=1)


@pytest.mark.unit
class TestBoundSearch:
    """Tests for the entropy-sum minimization"""

    def test_basis_state_candidate(self):
        result = bound_search(1, seed=0, extra_states=[[1.0, 0.0, 0.0]], refine=False)
        assert result.min_sum == pytest.approx(ENTROPIC_BOUND, abs=1e-12)
        assert np.allclose(result.argmin, [1.0, 0.0, 0.0])
        assert result.gap == pytest.approx(0.0, abs=1e-12)

    def test_deterministic(self):
        first = bound_search(500, seed=3, refine=False)
        second = bound_search(500, seed=3, refine=False)
        assert first.min_sum == second.min_sum
        assert np.array_equal(first.argmin, second.argmin)

    def test_refinement_never_worse(self):
        result = bound_search(2000, seed=5, refine=True)
        assert result.refined
        assert result.min_sum <= result.sampled_min
        assert result.min_sum >= ENTROPIC_BOUND - 1e-6

    def test_sample_count_validated(self):
        with pytest.raises(InvalidParameterError):
            bound_search(0, seed=1)

    def test_violation_raised(self, monkeypatch):
        monkeypatch.setattr(oracle, 'entropy_sum', lambda a: np.zeros(len(np.atleast_1d(a.t))))
        with pytest.raises(BoundViolation):
            bound_search(10, seed=1, refine=False)

    def test_as_dict(self):
        data = bound_search(50, seed=9, refine=False).as_dict()
        assert data['samples'] == 50
        assert data['bound'] == pytest.approx(2 * math.log(2))
        assert len(data['argmin']) == 3
        assert data['refined'] is False

    @pytest.mark.slow
    def test_full_search_is_tight(self):
        result = bound_search(100000, seed=2024, refine=True)
        assert 0.0 <= result.gap + 1e-6
        assert result.gap < 1e-3
