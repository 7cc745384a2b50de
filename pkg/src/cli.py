"""
Command-line interface for the squeezing simulator
Subcommands: evolve, sweep, figure, verify, bound-search
"""
import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from config import Config, get_config
from simulator.exceptions import ConfigError, InvalidParameterError, SimulationError
from simulator.model import Convention, InitialAmplitudes, SystemParams, amplitudes_from_angles, preset
from simulator.oracle import bound_search
from simulator.output import write_csv, write_json
from simulator.runner import (
    SQUEEZING_PANELS,
    SWEEPABLE,
    FigureBundle,
    RunConfig,
    Trajectory,
    figure,
    summarize,
    sweep,
)
from simulator.svg_plot import PlotStyle, write_svg_plot
from simulator.utils import get_safe_output_path, validate_file_exists, validate_file_extension
from simulator.verification import run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

CONFIG_KEYS = frozenset({'kappa', 'gamma0', 'theta', 'delta', 'initial', 'tmax', 'dt', 'label', 'axes'})
INITIAL_KEYS = frozenset({'preset', 'alpha', 'beta', 'convention', 'amplitudes'})

PANEL_TITLES = {
    'e_sx': 'E(Sx)',
    'e_sy': 'E(Sy)',
    'v_sx': 'V(Sx)',
    'v_sy': 'V(Sy)',
    'sz_expect': '<Sz>',
    'coherence': 'C_l1',
}


def configure_logging(level: str) -> None:
    """Configure application logging; diagnostics go to stderr"""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
        force=True,
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--out', type=Path, help="Output directory")
    parser.add_argument('--env', help="Configuration profile (development, production, testing)")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="More log output (-vv for debug)")
    parser.add_argument('-q', '--quiet', action='store_true', help="Only log errors")


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', type=Path, help="JSON run configuration; flags override its values")
    parser.add_argument('--kappa', type=float)
    parser.add_argument('--gamma0', type=float)
    parser.add_argument('--theta', type=float)
    parser.add_argument('--delta', type=float)
    initial = parser.add_mutually_exclusive_group()
    initial.add_argument('--preset', help="Named initial state (S1, S2, S2_B_COS)")
    initial.add_argument('--amplitudes', type=float, nargs=6,
                         metavar=('RE_A', 'IM_A', 'RE_B', 'IM_B', 'RE_C', 'IM_C'),
                         help="Initial amplitudes of |A>, |B>, |C>")
    parser.add_argument('--alpha', type=float)
    parser.add_argument('--beta', type=float)
    parser.add_argument('--convention', choices=Convention.names())
    parser.add_argument('--tmax', type=float)
    parser.add_argument('--dt', type=float)
    parser.add_argument('--label', help="Output file stem")
    parser.add_argument('--plot', action='store_true', help="Also write SVG plots")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='squeezing',
        description="Entropy and variance squeezing of a V-type atom in a dissipative cavity",
    )
    commands = parser.add_subparsers(dest='command', required=True)

    evolve_cmd = commands.add_parser('evolve', help="Evaluate one trajectory")
    _add_run_options(evolve_cmd)
    _add_common(evolve_cmd)

    sweep_cmd = commands.add_parser('sweep', help="Cartesian parameter sweep")
    _add_run_options(sweep_cmd)
    sweep_cmd.add_argument('--axis', action='append', default=[], metavar='NAME=V1,V2,...',
                           help=f"Sweep axis; NAME in {', '.join(SWEEPABLE)}")
    sweep_cmd.add_argument('--workers', type=int)
    _add_common(sweep_cmd)

    figure_cmd = commands.add_parser('figure', help="Reproduce a figure preset")
    figure_cmd.add_argument('figure_id', help="fig1 .. fig8")
    figure_cmd.add_argument('--workers', type=int)
    figure_cmd.add_argument('--tmax', type=float)
    figure_cmd.add_argument('--dt', type=float)
    figure_cmd.add_argument('--no-plot', dest='plot', action='store_false', help="Skip SVG output")
    _add_common(figure_cmd)

    verify_cmd = commands.add_parser('verify', help="Run the oracle suite")
    verify_cmd.add_argument('--states', type=int, help="Random reachable states to check")
    verify_cmd.add_argument('--samples', type=int, help="Bound-search samples")
    verify_cmd.add_argument('--seed', type=int, help="Bound-search seed")
    _add_common(verify_cmd)

    bound_cmd = commands.add_parser('bound-search', help="Minimize the entropy sum over pure states")
    bound_cmd.add_argument('--samples', type=int)
    bound_cmd.add_argument('--seed', type=int)
    bound_cmd.add_argument('--refine', action=argparse.BooleanOptionalAction, default=None,
                           help="Polish the best sample with Nelder-Mead")
    _add_common(bound_cmd)

    return parser


def load_run_document(path: Path) -> Dict[str, object]:
    """
    Read a JSON run configuration

    Raises:
        ConfigError: If the file is missing, malformed or has unknown keys
    """
    validate_file_exists(path)
    validate_file_extension(path, {'json'})
    try:
        document = json.loads(path.read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(str(path), f"Cannot parse JSON: {e}") from e
    if not isinstance(document, dict):
        raise ConfigError(str(path), "Top level must be an object")
    unknown = set(document) - CONFIG_KEYS
    if unknown:
        raise ConfigError(str(path), f"Unknown keys: {', '.join(sorted(unknown))}")
    initial = document.get('initial')
    if initial is not None:
        if not isinstance(initial, dict):
            raise ConfigError(str(path), "'initial' must be an object")
        unknown = set(initial) - INITIAL_KEYS
        if unknown:
            raise ConfigError(str(path), f"Unknown initial keys: {', '.join(sorted(unknown))}")
    return document


def _initial_from_document(initial: Dict[str, object]) -> InitialAmplitudes:
    if 'preset' in initial:
        return preset(str(initial['preset']))
    if 'amplitudes' in initial:
        return InitialAmplitudes.from_pairs(initial['amplitudes'], renormalize=True)
    if 'alpha' in initial and 'beta' in initial:
        return amplitudes_from_angles(float(initial['alpha']), float(initial['beta']),
                                      initial.get('convention', Convention.B_SIN))
    raise InvalidParameterError('initial', initial, "Expected preset, amplitudes or alpha and beta")


def _initial_from_args(args: argparse.Namespace, document: Dict[str, object]) -> InitialAmplitudes:
    if args.preset is not None:
        return preset(args.preset)
    if args.amplitudes is not None:
        values = args.amplitudes
        return InitialAmplitudes.from_pairs([values[0:2], values[2:4], values[4:6]], renormalize=True)
    if args.alpha is not None or args.beta is not None:
        if args.alpha is None or args.beta is None:
            raise InvalidParameterError('alpha/beta', (args.alpha, args.beta), "Give both --alpha and --beta")
        return amplitudes_from_angles(args.alpha, args.beta, args.convention or Convention.B_SIN)
    if document.get('initial') is not None:
        return _initial_from_document(document['initial'])
    return preset('S1')


def _number(document: Dict[str, object], key: str, default: float) -> float:
    value = document.get(key, default)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(key, value, "Must be a number") from None


def run_config_from_args(args: argparse.Namespace, config: Config) -> RunConfig:
    """Merge the JSON document (if any) with command-line flags; flags win."""
    document = load_run_document(args.config) if args.config else {}
    values = {key: _number(document, key, default) for key, default in
              (('kappa', 1.0), ('gamma0', 0.0), ('theta', 0.0), ('delta', 0.0))}
    for key in values:
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    t_max = args.tmax if args.tmax is not None else _number(document, 'tmax', config.DEFAULT_T_MAX)
    dt = args.dt if args.dt is not None else _number(document, 'dt', config.DEFAULT_DT)
    label = args.label or str(document.get('label', args.command))
    return RunConfig(
        params=SystemParams(**values),
        initial=_initial_from_args(args, document),
        t_max=t_max,
        dt=dt,
        label=label,
    )


def parse_axis(text: str) -> Tuple[str, List[float]]:
    """'theta=0,0.5,1' -> ('theta', [0.0, 0.5, 1.0])."""
    name, sep, values = text.partition('=')
    if not sep or not values:
        raise InvalidParameterError('axis', text, "Expected NAME=V1,V2,...")
    try:
        return name.strip(), [float(v) for v in values.split(',') if v.strip()]
    except ValueError:
        raise InvalidParameterError('axis', text, "Axis values must be numbers") from None


def _axes_from(args: argparse.Namespace) -> List[Tuple[str, List[float]]]:
    axes = [parse_axis(text) for text in args.axis]
    if not axes and args.config:
        document = load_run_document(args.config)
        for name, values in dict(document.get('axes') or {}).items():
            axes.append((name, [float(v) for v in values]))
    return axes


def _style(config: Config, title: str, y_label: str) -> PlotStyle:
    return PlotStyle(width=config.PLOT_WIDTH, height=config.PLOT_HEIGHT, title=title, y_label=y_label)


def write_run_files(trajectories: Sequence[Trajectory], out_dir: Path, config: Config,
                    summaries: bool = True, columns: Optional[Sequence[str]] = None) -> List[Path]:
    written = []
    for trajectory in trajectories:
        written.append(write_csv(trajectory, get_safe_output_path(trajectory.label, out_dir), columns))
        if summaries:
            written.append(write_json(summarize(trajectory).as_dict(),
                                      get_safe_output_path(f"{trajectory.label}_summary", out_dir, '.json')))
    return written


def write_panel_plots(name: str, trajectories: Sequence[Trajectory], panels: Sequence[str],
                      out_dir: Path, config: Config, title: str = '') -> List[Path]:
    written = []
    for panel in panels:
        series = []
        for trajectory in trajectories:
            legend = ', '.join(f"{k} = {v:g}" for k, v in trajectory.coordinates.items()) or trajectory.label
            series.append((legend, trajectory.times, trajectory.column(panel)))
        style = _style(config, f"{title} {PANEL_TITLES.get(panel, panel)}".strip(), PANEL_TITLES.get(panel, panel))
        written.append(write_svg_plot(series, get_safe_output_path(f"{name}_{panel}", out_dir, '.svg'), style))
    return written


def _print_paths(paths: Sequence[Path]) -> None:
    for path in paths:
        print(path)


def cmd_evolve(args: argparse.Namespace, config: Config, out_dir: Path) -> int:
    run = run_config_from_args(args, config)
    trajectories = sweep(run, [])
    written = write_run_files(trajectories, out_dir, config)
    if args.plot:
        written += write_panel_plots(run.label, trajectories, SQUEEZING_PANELS, out_dir, config)
    _print_paths(written)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: Config, out_dir: Path) -> int:
    run = run_config_from_args(args, config)
    workers = args.workers or config.WORKERS
    trajectories = sweep(run, _axes_from(args), workers=workers)
    written = write_run_files(trajectories, out_dir, config)
    if args.plot:
        written += write_panel_plots(run.label, trajectories, SQUEEZING_PANELS, out_dir, config)
    _print_paths(written)
    return EXIT_OK


def write_figure(bundle: FigureBundle, out_dir: Path, config: Config, plot: bool = True) -> List[Path]:
    preset_ = bundle.preset
    written = write_run_files(bundle.trajectories, out_dir, config, summaries=False,
                              columns=preset_.base.outputs)
    if plot:
        written += write_panel_plots(preset_.figure_id, bundle.trajectories, preset_.panels,
                                     out_dir, config, title=preset_.figure_id)
    return written


def cmd_figure(args: argparse.Namespace, config: Config, out_dir: Path) -> int:
    bundle = figure(args.figure_id, workers=args.workers or config.WORKERS, t_max=args.tmax, dt=args.dt)
    _print_paths(write_figure(bundle, out_dir, config, plot=args.plot))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: Config, out_dir: Path) -> int:
    settings = config.verification_settings()
    overrides = {}
    if args.states is not None:
        overrides['random_states'] = args.states
    if args.samples is not None:
        overrides['bound_samples'] = args.samples
    if args.seed is not None:
        overrides['bound_seed'] = args.seed
    if overrides:
        settings = replace(settings, **overrides)

    report = run_verification(settings)
    for line in report.lines():
        print(line)
    write_json(report.as_dict(), out_dir / 'verification_report.json')
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_bound_search(args: argparse.Namespace, config: Config, out_dir: Path) -> int:
    samples = args.samples if args.samples is not None else config.BOUND_SAMPLES
    seed = args.seed if args.seed is not None else config.BOUND_SEED
    refine = config.BOUND_REFINE if args.refine is None else args.refine
    result = bound_search(samples, seed, refine=refine)
    document = result.as_dict()
    print(json.dumps(document, sort_keys=True, indent=2))
    write_json(document, out_dir / 'bound_search.json')
    return EXIT_OK


COMMANDS = {
    'evolve': cmd_evolve,
    'sweep': cmd_sweep,
    'figure': cmd_figure,
    'verify': cmd_verify,
    'bound-search': cmd_bound_search,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI

    Returns:
        0 on success, 1 on verification or simulation failure, 2 on usage errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        config = get_config(args.env)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    level = config.LOG_LEVEL
    if args.quiet:
        level = 'ERROR'
    elif args.verbose:
        level = 'DEBUG' if args.verbose > 1 else 'INFO'
    configure_logging(level)

    out_dir = args.out or config.OUTPUT_FOLDER
    logger.info(f"Running '{args.command}' (output: {out_dir})")
    try:
        return COMMANDS[args.command](args, config, out_dir)
    except (InvalidParameterError, ConfigError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except SimulationError as e:
        logger.error(str(e))
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
