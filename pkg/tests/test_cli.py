"""
Integration tests for cli.py
Tests subcommands, config files, output files and exit codes
"""
import json

import pytest

import cli
from cli import build_parser, load_run_document, main, parse_axis, run_config_from_args
from config import get_config
from simulator.exceptions import BoundViolation, ConfigError, InvalidParameterError
from simulator.model import Convention, preset
from simulator.output import read_csv
from simulator.verification import VerificationReport

COMMON = ['--env', 'testing', '-q']


def write_config(directory, document, name='run.json'):
    path = directory / name
    path.write_text(json.dumps(document))
    return path


@pytest.mark.unit
class TestParsing:
    """Tests for argument and config-file parsing"""

    def test_parse_axis(self):
        """Test axis specification parsing"""
        assert parse_axis('theta=0,0.5,1') == ('theta', [0.0, 0.5, 1.0])

    @pytest.mark.parametrize('text', ['theta', 'theta=', 'theta=a,b'])
    def test_parse_axis_invalid(self, text):
        with pytest.raises(InvalidParameterError):
            parse_axis(text)

    def test_flags_override_file(self, temp_dir):
        """Command-line flags win over config file values"""
        path = write_config(temp_dir, {'gamma0': 10, 'theta': 0.5, 'tmax': 2, 'label': 'cfg',
                                       'initial': {'preset': 'S2'}})
        args = build_parser().parse_args(['evolve', '--config', str(path), '--theta', '1'])
        run = run_config_from_args(args, get_config('testing'))
        assert run.params.gamma0 == 10.0
        assert run.params.theta == 1.0
        assert run.t_max == 2.0
        assert run.label == 'cfg'
        assert run.initial == preset('S2')

    def test_angles_from_flags(self):
        args = build_parser().parse_args(['evolve', '--alpha', '0', '--beta', '0'])
        run = run_config_from_args(args, get_config('testing'))
        assert run.initial.dA == pytest.approx(1.0)

    def test_convention_alias_flag(self):
        args = build_parser().parse_args(['evolve', '--alpha', '1.2566', '--beta', '0.31416', '--convention', 'EQ33'])
        run = run_config_from_args(args, get_config('testing'))
        assert run.initial.angles.convention is Convention.B_COS

    def test_convention_alias_in_file(self, temp_dir):
        path = write_config(temp_dir, {'initial': {'alpha': 0.5, 'beta': 0.2, 'convention': 'EQ31'}})
        args = build_parser().parse_args(['evolve', '--config', str(path)])
        run = run_config_from_args(args, get_config('testing'))
        assert run.initial.angles.convention is Convention.B_SIN

    def test_alpha_without_beta(self):
        args = build_parser().parse_args(['evolve', '--alpha', '0.3'])
        with pytest.raises(InvalidParameterError, match="both"):
            run_config_from_args(args, get_config('testing'))

    def test_typed_amplitudes_renormalized(self):
        """Four-digit amplitudes are accepted and rescaled"""
        args = build_parser().parse_args(['evolve', '--amplitudes', '0.7071068', '0', '0', '0', '0.7071068', '0'])
        run = run_config_from_args(args, get_config('testing'))
        assert abs(run.initial.dA) ** 2 + abs(run.initial.dC) ** 2 == pytest.approx(1.0, abs=1e-14)

    def test_defaults_without_file(self):
        args = build_parser().parse_args(['evolve'])
        run = run_config_from_args(args, get_config('testing'))
        assert run.initial == preset('S1')
        assert run.t_max == 50.0
        assert run.label == 'evolve'

    def test_unknown_key(self, temp_dir):
        path = write_config(temp_dir, {'gamma': 10})
        with pytest.raises(ConfigError, match="Unknown keys"):
            load_run_document(path)

    def test_unknown_initial_key(self, temp_dir):
        path = write_config(temp_dir, {'initial': {'state': 'S1'}})
        with pytest.raises(ConfigError, match="Unknown initial keys"):
            load_run_document(path)

    def test_malformed_json(self, temp_dir):
        path = temp_dir / 'broken.json'
        path.write_text('{"kappa": ')
        with pytest.raises(ConfigError, match="Cannot parse"):
            load_run_document(path)

    def test_wrong_extension(self, temp_dir):
        path = write_config(temp_dir, {}, name='run.yaml')
        with pytest.raises(ConfigError, match="Invalid extension"):
            load_run_document(path)


@pytest.mark.integration
class TestCommands:
    """Tests for subcommand output files"""

    def test_evolve(self, temp_dir, capsys):
        """Evolve writes a CSV and a summary"""
        code = main(['evolve', '--preset', 'S1', '--gamma0', '10', '--theta', '0.5',
                     '--tmax', '1', '--out', str(temp_dir)] + COMMON)
        assert code == 0
        frame = read_csv(temp_dir / 'evolve.csv')
        assert len(frame) == 101
        summary = json.loads((temp_dir / 'evolve_summary.json').read_text())
        assert summary['regime'] == 'non-markovian'
        assert str(temp_dir / 'evolve.csv') in capsys.readouterr().out

    def test_evolve_with_plots(self, temp_dir):
        code = main(['evolve', '--tmax', '1', '--label', 'demo', '--plot', '--out', str(temp_dir)] + COMMON)
        assert code == 0
        assert (temp_dir / 'demo_e_sx.svg').exists()
        assert (temp_dir / 'demo_sz_expect.svg').exists()

    def test_sweep(self, temp_dir):
        code = main(['sweep', '--gamma0', '10', '--axis', 'theta=0,1', '--tmax', '1', '--label', 'sw',
                     '--out', str(temp_dir)] + COMMON)
        assert code == 0
        assert (temp_dir / 'sw_theta0.csv').exists()
        assert (temp_dir / 'sw_theta1.csv').exists()

    def test_sweep_axes_from_config(self, temp_dir):
        path = write_config(temp_dir, {'gamma0': 10, 'tmax': 1, 'label': 'cfg', 'axes': {'delta': [0, 5]}})
        code = main(['sweep', '--config', str(path), '--out', str(temp_dir / 'out')] + COMMON)
        assert code == 0
        assert (temp_dir / 'out' / 'cfg_delta5.csv').exists()

    def test_figure_files(self, temp_dir):
        """Figure output follows the fig<N>_<param><value> naming"""
        code = main(['figure', 'fig5', '--tmax', '1', '--out', str(temp_dir)] + COMMON)
        assert code == 0
        assert (temp_dir / 'fig5_gamma0.1.csv').exists()
        assert (temp_dir / 'fig5_gamma10.csv').exists()
        assert (temp_dir / 'fig5_e_sx.svg').exists()
        assert not list(temp_dir.glob('*_summary.json'))

    def test_figure_without_plots(self, temp_dir):
        code = main(['figure', 'fig1', '--tmax', '1', '--no-plot', '--out', str(temp_dir)] + COMMON)
        assert code == 0
        assert not list(temp_dir.glob('*.svg'))

    def test_coherence_figure_columns(self, temp_dir):
        code = main(['figure', 'fig8', '--tmax', '1', '--no-plot', '--out', str(temp_dir)] + COMMON)
        assert code == 0
        frame = read_csv(temp_dir / 'fig8_delta5_gamma10.csv')
        assert list(frame.columns) == ['t', 'bath_weight', 'Sz_expect', 'coherence_l1']

    def test_bound_search(self, temp_dir, capsys):
        code = main(['bound-search', '--samples', '200', '--seed', '3', '--no-refine',
                     '--out', str(temp_dir)] + COMMON)
        assert code == 0
        printed = json.loads(capsys.readouterr().out)
        assert printed['samples'] == 200
        assert json.loads((temp_dir / 'bound_search.json').read_text()) == printed

    def test_verify_failure_exit_code(self, temp_dir, monkeypatch, capsys):
        """A failing oracle check exits with status 1"""
        def failing(settings):
            report = VerificationReport()
            report.add('ode_equivalence', 1.0, 1e-6)
            return report

        monkeypatch.setattr(cli, 'run_verification', failing)
        assert main(['verify', '--out', str(temp_dir)] + COMMON) == 1
        assert '[FAIL] ode_equivalence' in capsys.readouterr().out
        assert json.loads((temp_dir / 'verification_report.json').read_text())['passed'] is False

    def test_verify_overrides(self, temp_dir, monkeypatch):
        seen = {}

        def record(settings):
            seen['settings'] = settings
            return VerificationReport()

        monkeypatch.setattr(cli, 'run_verification', record)
        assert main(['verify', '--states', '10', '--samples', '20', '--seed', '4',
                     '--out', str(temp_dir)] + COMMON) == 0
        settings = seen['settings']
        assert (settings.random_states, settings.bound_samples, settings.bound_seed) == (10, 20, 4)


@pytest.mark.integration
class TestExitCodes:
    """Tests for error handling at the command boundary"""

    def test_missing_command(self):
        assert main([]) == 2

    def test_unknown_figure(self, temp_dir):
        assert main(['figure', 'fig9', '--out', str(temp_dir)] + COMMON) == 2

    def test_invalid_parameter(self, temp_dir):
        assert main(['evolve', '--theta', '2', '--out', str(temp_dir)] + COMMON) == 2

    def test_unknown_sweep_axis(self, temp_dir):
        assert main(['sweep', '--axis', 'kappa=1,2', '--tmax', '1', '--out', str(temp_dir)] + COMMON) == 2

    def test_bad_config_file(self, temp_dir):
        path = write_config(temp_dir, {'colour': 'blue'})
        assert main(['evolve', '--config', str(path), '--out', str(temp_dir)] + COMMON) == 2

    def test_simulation_error(self, temp_dir, monkeypatch):
        def violate(*args, **kwargs):
            raise BoundViolation(1.0, 1.386)

        monkeypatch.setattr(cli, 'bound_search', violate)
        assert main(['bound-search', '--out', str(temp_dir)] + COMMON) == 1

    def test_help(self, capsys):
        assert main(['--help']) == 0
        assert 'figure' in capsys.readouterr().out
