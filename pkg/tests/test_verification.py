"""
Unit tests for simulator/verification.py
"""
import pytest

from simulator import verification
from simulator.exceptions import InvalidDensityMatrix
from simulator.runner import FIGURES
from simulator.verification import (
    CheckResult,
    VerificationReport,
    VerificationSettings,
    entropy_mismatch,
    figure_parameter_sets,
    moment_mismatch,
    run_verification,
)

SMALL = VerificationSettings(
    ode_t_max=2.0,
    random_states=50,
    bound_samples=500,
    refine=False,
    figures=('fig1', 'fig2'),
)


@pytest.mark.unit
class TestReport:
    """Tests for check bookkeeping"""

    def test_upper_bound_check(self):
        report = VerificationReport()
        check = report.add('error', 1e-13, 1e-12)
        assert check.passed
        assert report.passed

    def test_floor_check(self):
        report = VerificationReport()
        report.add('ratio', 11.0, 12.0, at_least=True)
        assert not report.passed
        assert [c.name for c in report.failures] == ['ratio']

    def test_line_format(self):
        check = CheckResult('ode_equivalence', 2.5e-9, 1e-6, True)
        assert check.line() == '[PASS] ode_equivalence: 2.500e-09 (<= 1.0e-06)'

    def test_as_dict(self):
        report = VerificationReport()
        report.add('ratio', 16.0, 12.0, at_least=True, detail='dt 0.01')
        data = report.as_dict()
        assert data['passed'] is True
        assert data['checks'][0]['comparison'] == '>='

    def test_summary_line(self):
        report = VerificationReport()
        report.add('a', 0.0, 1.0)
        report.add('b', 2.0, 1.0)
        assert report.lines()[-1] == '1/2 checks passed'


@pytest.mark.unit
class TestHelpers:
    """Tests for the comparison helpers"""

    def test_parameter_sets_unique(self):
        sets = figure_parameter_sets(tuple(FIGURES))
        assert len(sets) == len(set(sets))
        assert any(p.delta == 10.0 for p in sets)

    def test_mismatch_on_random_states(self, random_states):
        assert entropy_mismatch(random_states) < 1e-12
        assert moment_mismatch(random_states) < 1e-12


@pytest.mark.integration
class TestRunVerification:
    """End-to-end oracle runs"""

    def test_small_run(self):
        report = run_verification(SMALL)
        names = [c.name for c in report.checks]
        assert names == [
            'ode_equivalence', 'ode_convergence_ratio', 'branch_independence', 'triviality_identities',
            'entropy_equivalence_random', 'trace_oracle_random', 'mixture_reconstruction',
            'entropy_equivalence_figures', 'heisenberg_bound', 'entropic_bound',
            'entropy_factor_floor', 'sy_never_squeezed', 'bound_search_tightness',
        ]
        failed = [c.name for c in report.failures if c.name != 'bound_search_tightness']
        assert failed == []

    def test_state_error_recorded_as_failure(self, monkeypatch):
        """An invalid state inside one group fails that group and the rest still run"""
        def broken(states):
            raise InvalidDensityMatrix("Density matrix is not positive semidefinite", t=0.0)

        monkeypatch.setattr(verification, 'mixture_reconstruction', broken)
        report = run_verification(SMALL)
        names = [c.name for c in report.checks]
        assert 'random_states_error' in names
        assert 'entropy_equivalence_figures' in names
        failed = report.failures[0]
        assert failed.name == 'random_states_error'
        assert 't=0' in failed.detail

    @pytest.mark.slow
    def test_full_run_passes(self):
        report = run_verification(VerificationSettings())
        assert report.passed, '\n'.join(report.lines())
