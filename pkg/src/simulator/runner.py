"""
Time-grid evolution, parameter sweeps and the figure presets
Every run is a closed-form evaluation, so results are deterministic.
"""
import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from multiprocessing import Pool
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from .exceptions import InvalidParameterError, UnknownFigure, UnknownParameter
from .model import (
    AmplitudeSet,
    AngleSpec,
    Convention,
    InitialAmplitudes,
    SystemParams,
    amplitudes_from_angles,
    asymptotic_amplitudes,
    evolve_amplitudes,
    preset,
)
from .squeezing import RECORD_FIELDS, SqueezingRecord, entropy_factor, observables
from .utils import format_value

logger = logging.getLogger(__name__)

SWEEPABLE = ('theta', 'gamma0', 'delta', 'alpha', 'beta')
# File-label spelling of each axis; gamma0 is written without its index
LABEL_PREFIXES = {'gamma0': 'gamma'}
PARAM_AXES = ('theta', 'gamma0', 'delta')
ANGLE_AXES = ('alpha', 'beta')

DEFAULT_T_MAX = 50.0
DEFAULT_DT = 0.01
SETTLING_TOLERANCE = 1e-2

InitialSpec = Union[InitialAmplitudes, str, Tuple[float, float], Tuple[float, float, str], AngleSpec]


def resolve_initial(value: InitialSpec) -> InitialAmplitudes:
    """
    Accept a state, a preset name, an AngleSpec or an (alpha, beta[, convention]) tuple
    """
    if isinstance(value, InitialAmplitudes):
        return value
    if isinstance(value, str):
        return preset(value)
    if isinstance(value, AngleSpec):
        return amplitudes_from_angles(value.alpha, value.beta, value.convention)
    if isinstance(value, (tuple, list)) and len(value) in (2, 3):
        convention = value[2] if len(value) == 3 else Convention.B_SIN
        return amplitudes_from_angles(float(value[0]), float(value[1]), convention)
    raise InvalidParameterError('initial', value, "Expected a preset name, angles or amplitudes")


def time_grid(t_max: float, dt: float) -> np.ndarray:
    """t_k = k dt for k = 0 .. floor(t_max / dt)."""
    if not dt > 0:
        raise InvalidParameterError('dt', dt, "Step must be positive")
    if not t_max >= dt:
        raise InvalidParameterError('t_max', t_max, f"Time span must be at least dt={dt:g}")
    count = int(math.floor(t_max / dt + 1e-9))
    return np.arange(count + 1) * dt


@dataclass(frozen=True)
class RunConfig:
    """
    One trajectory request

    Attributes:
        params: System parameters
        initial: Initial state, preset name or angle specification
        t_max: Last grid time
        dt: Grid step
        outputs: CSV columns to write (t is always first)
        label: Stem for output files
    """
    params: SystemParams = field(default_factory=SystemParams)
    initial: InitialSpec = 'S1'
    t_max: float = DEFAULT_T_MAX
    dt: float = DEFAULT_DT
    outputs: Optional[Tuple[str, ...]] = None
    label: str = 'run'

    def __post_init__(self):
        object.__setattr__(self, 'initial', resolve_initial(self.initial))
        time_grid(self.t_max, self.dt)
        if self.outputs is not None:
            object.__setattr__(self, 'outputs', tuple(self.outputs))

    @property
    def grid(self) -> np.ndarray:
        return time_grid(self.t_max, self.dt)

    def with_coordinate(self, name: str, value: float) -> 'RunConfig':
        """Copy with one sweepable parameter replaced."""
        if name not in SWEEPABLE:
            raise UnknownParameter(name, SWEEPABLE)
        if name in PARAM_AXES:
            return replace(self, params=self.params.updated(**{name: float(value)}))
        angles = self.initial.angles
        if angles is None:
            raise InvalidParameterError(
                name, value, "Angle sweeps need an initial state given by angles or preset"
            )
        alpha = float(value) if name == 'alpha' else angles.alpha
        beta = float(value) if name == 'beta' else angles.beta
        return replace(self, initial=amplitudes_from_angles(alpha, beta, angles.convention))


class Trajectory(Sequence):
    """
    Immutable sequence of SqueezingRecord backed by column arrays

    Attributes:
        label: Run label used for file names and legends
        coordinates: Sweep coordinates of this run (empty for a plain run)
        config: The RunConfig that produced it, when known
    """

    def __init__(self, columns: Dict[str, np.ndarray], label: str = 'run',
                 coordinates: Optional[Dict[str, float]] = None,
                 config: Optional[RunConfig] = None):
        missing = [name for name in RECORD_FIELDS if name not in columns]
        if missing:
            raise InvalidParameterError('columns', sorted(columns), f"Missing fields: {', '.join(missing)}")
        self._columns = {}
        for name in RECORD_FIELDS:
            array = np.array(columns[name])
            array.setflags(write=False)
            self._columns[name] = array
        self.label = label
        self.coordinates = dict(coordinates or {})
        self.config = config

    def __len__(self) -> int:
        return len(self._columns['t'])

    def __getitem__(self, index):
        if isinstance(index, slice):
            sliced = {name: values[index] for name, values in self._columns.items()}
            return Trajectory(sliced, self.label, self.coordinates, self.config)
        values = {}
        for name in RECORD_FIELDS:
            item = self._columns[name][index]
            values[name] = complex(item) if name in ('d_a', 'd_b', 'd_c') else float(item)
        return SqueezingRecord(**values)

    def column(self, name: str) -> np.ndarray:
        if name not in self._columns:
            raise InvalidParameterError('column', name, f"Known columns: {', '.join(RECORD_FIELDS)}")
        return self._columns[name]

    @property
    def times(self) -> np.ndarray:
        return self._columns['t']

    @property
    def columns(self) -> Dict[str, np.ndarray]:
        return dict(self._columns)

    def amplitudes(self) -> AmplitudeSet:
        """The amplitude columns as an AmplitudeSet."""
        return AmplitudeSet(
            t=self._columns['t'],
            dA=self._columns['d_a'],
            dB=self._columns['d_b'],
            dC=self._columns['d_c'],
            bath_weight=self._columns['bath_weight'],
        )

    def __repr__(self) -> str:
        return f"Trajectory(label={self.label!r}, points={len(self)})"


def evolve(config: RunConfig) -> Trajectory:
    """
    Evaluate every diagnostic on the run's time grid

    Errors raised along the way carry the offending time.
    """
    grid = config.grid
    logger.debug(f"Evolving '{config.label}' over {len(grid)} points ({config.params})")
    amplitudes = evolve_amplitudes(config.params, config.initial, grid)
    return Trajectory(observables(amplitudes), label=config.label, config=config)


def _cell_label(base: str, coordinates: Dict[str, float]) -> str:
    parts = [f"{LABEL_PREFIXES.get(name, name)}{format_value(value)}" for name, value in coordinates.items()]
    return '_'.join([base] + parts)


def _evolve_cell(cell: Tuple[RunConfig, Dict[str, float]]) -> Trajectory:
    config, coordinates = cell
    trajectory = evolve(config)
    trajectory.coordinates = coordinates
    return trajectory


def sweep_cells(base: RunConfig, axes: Iterable[Tuple[str, Iterable[float]]]) -> List[Tuple[RunConfig, Dict[str, float]]]:
    """
    Cartesian product of the sweep axes as (config, coordinates) pairs

    Raises:
        UnknownParameter: If an axis names something that cannot be swept
    """
    axes = [(name, [float(v) for v in values]) for name, values in axes]
    for name, values in axes:
        if name not in SWEEPABLE:
            raise UnknownParameter(name, SWEEPABLE)
        if not values:
            raise InvalidParameterError(name, values, "Sweep axis needs at least one value")
    if not axes:
        return [(base, {})]

    cells = []
    names = [name for name, _ in axes]
    for point in itertools.product(*(values for _, values in axes)):
        coordinates = dict(zip(names, point))
        config = base
        for name, value in coordinates.items():
            config = config.with_coordinate(name, value)
        config = replace(config, label=_cell_label(base.label, coordinates))
        cells.append((config, coordinates))
    return cells


def sweep(base: RunConfig, axes: Iterable[Tuple[str, Iterable[float]]], workers: int = 1) -> List[Trajectory]:
    """
    Run every cell of a parameter sweep

    Output order follows the coordinate order, whatever the worker count.
    """
    cells = sweep_cells(base, axes)
    logger.info(f"Sweeping '{base.label}': {len(cells)} run(s), {workers} worker(s)")
    if workers > 1 and len(cells) > 1:
        with Pool(min(workers, len(cells))) as pool:
            return pool.map(_evolve_cell, cells)
    if not cells[0][1]:
        return [evolve(base)]
    return [_evolve_cell(cell) for cell in cells]


@dataclass(frozen=True)
class FigurePreset:
    """Parameter set and panels of one figure"""
    figure_id: str
    base: RunConfig
    axes: Tuple[Tuple[str, Tuple[float, ...]], ...]
    panels: Tuple[str, ...]
    title: str

    def cells(self) -> List[Tuple[RunConfig, Dict[str, float]]]:
        return sweep_cells(self.base, self.axes)


SQUEEZING_PANELS = ('e_sx', 'e_sy', 'v_sx', 'v_sy', 'sz_expect')
DETUNING_PANELS = ('e_sx', 'v_sx', 'sz_expect')
COHERENCE_PANELS = ('coherence',)
COHERENCE_OUTPUTS = ('t', 'bath_weight', 'Sz_expect', 'coherence_l1')


def _figure(figure_id: str, initial: str, axes, panels=SQUEEZING_PANELS, t_max: float = DEFAULT_T_MAX,
            outputs=None, title: str = '', **params: float) -> FigurePreset:
    base = RunConfig(
        params=SystemParams(kappa=1.0, **params),
        initial=initial,
        t_max=t_max,
        outputs=outputs,
        label=figure_id,
    )
    axes = tuple((name, tuple(values)) for name, values in axes)
    return FigurePreset(figure_id, base, axes, panels, title)


FIGURES: Dict[str, FigurePreset] = {
    preset_.figure_id: preset_ for preset_ in (
        _figure('fig1', 'S1', [('gamma0', (0.1, 10.0))], theta=0.5, delta=0.0,
                title='S1, theta = 0.5, delta = 0'),
        _figure('fig2', 'S1', [('theta', (0.0, 0.5, 1.0))], gamma0=10.0, delta=0.0,
                title='S1, gamma0 = 10, delta = 0'),
        _figure('fig3', 'S2', [('gamma0', (0.1, 10.0))], theta=1.0, delta=0.0,
                title='S2, theta = 1, delta = 0'),
        _figure('fig4', 'S2', [('theta', (0.0, 0.5, 1.0))], gamma0=10.0, delta=0.0,
                title='S2, gamma0 = 10, delta = 0'),
        _figure('fig5', 'S2', [('gamma0', (0.1, 10.0))], t_max=600.0, theta=1.0, delta=5.0,
                title='S2, theta = 1, delta = 5'),
        _figure('fig6', 'S2', [('theta', (0.0, 0.5, 1.0))], gamma0=10.0, delta=5.0,
                title='S2, gamma0 = 10, delta = 5'),
        _figure('fig7', 'S2', [('delta', (0.0, 5.0, 10.0))], panels=DETUNING_PANELS, t_max=600.0,
                theta=1.0, gamma0=10.0, title='S2, theta = 1, gamma0 = 10'),
        _figure('fig8', 'S2', [('delta', (0.0, 5.0)), ('gamma0', (0.1, 10.0))],
                panels=COHERENCE_PANELS, outputs=COHERENCE_OUTPUTS, theta=1.0,
                title='S2, theta = 1, l1 coherence'),
    )
}


@dataclass
class FigureBundle:
    """Labelled trajectories of one figure preset"""
    preset: FigurePreset
    trajectories: List[Trajectory]

    @property
    def figure_id(self) -> str:
        return self.preset.figure_id

    def panel_series(self, panel: str) -> List[Tuple[str, np.ndarray, np.ndarray]]:
        """(legend label, t, values) for each line of one panel."""
        series = []
        for trajectory in self.trajectories:
            legend = ', '.join(f"{name} = {format_value(value)}" for name, value in trajectory.coordinates.items())
            series.append((legend or trajectory.label, trajectory.times, trajectory.column(panel)))
        return series


def figure_preset(figure_id: str) -> FigurePreset:
    key = str(figure_id).lower()
    if key not in FIGURES:
        raise UnknownFigure(figure_id, list(FIGURES))
    return FIGURES[key]


def figure(figure_id: str, workers: int = 1, t_max: Optional[float] = None,
           dt: Optional[float] = None) -> FigureBundle:
    """
    Reproduce one figure's parameter set

    Args:
        figure_id: One of fig1 .. fig8
        workers: Sweep parallelism
        t_max: Override the preset's time span
        dt: Override the grid step

    Raises:
        UnknownFigure: If the id has no preset
    """
    preset_ = figure_preset(figure_id)
    base = preset_.base
    if t_max is not None or dt is not None:
        base = replace(base, t_max=t_max if t_max is not None else base.t_max,
                       dt=dt if dt is not None else base.dt)
    logger.info(f"Figure {preset_.figure_id}: {preset_.title}")
    return FigureBundle(preset_, sweep(base, preset_.axes, workers=workers))


def crossings(trajectory: Trajectory, column: str) -> List[float]:
    """
    Times where the column changes sign, linearly interpolated

    Touching zero counts as a crossing at the touching point.
    """
    t = trajectory.times
    values = trajectory.column(column)
    sign = np.sign(values)
    found = []
    for k in range(len(values) - 1):
        if sign[k] == 0:
            continue
        if sign[k + 1] == 0:
            found.append(float(t[k + 1]))
        elif sign[k] != sign[k + 1]:
            fraction = values[k] / (values[k] - values[k + 1])
            found.append(float(t[k] + fraction * (t[k + 1] - t[k])))
    return found


def onset_time(trajectory: Trajectory, column: str = 'e_sx') -> Optional[float]:
    """First sign change of the column, or None."""
    times = crossings(trajectory, column)
    return times[0] if times else None


def settling_time(trajectory: Trajectory, column: str = 'e_sx',
                  tolerance: float = SETTLING_TOLERANCE) -> float:
    """Earliest grid time after which the column stays within tolerance of its last value."""
    values = trajectory.column(column)
    outside = np.flatnonzero(np.abs(values - values[-1]) > tolerance)
    if outside.size == 0:
        return float(trajectory.times[0])
    last = int(outside[-1])
    return float(trajectory.times[min(last + 1, len(values) - 1)])


def negative_windows(trajectory: Trajectory, column: str = 'v_sx') -> List[Tuple[float, float]]:
    """Maximal (first, last) grid-time intervals on which the column is negative."""
    negative = trajectory.column(column) < 0
    t = trajectory.times
    windows = []
    start = None
    for k, flag in enumerate(negative):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            windows.append((float(t[start]), float(t[k - 1])))
            start = None
    if start is not None:
        windows.append((float(t[start]), float(t[-1])))
    return windows


@dataclass(frozen=True)
class RunSummary:
    """Scalar landmarks of one trajectory"""
    label: str
    coordinates: Dict[str, float]
    regime: Optional[str]
    points: int
    onset_e_sx: Optional[float]
    settling_e_sx: float
    min_e_sx: float
    t_min_e_sx: float
    min_v_sx: float
    t_min_v_sx: float
    variance_windows: int
    asymptotic_e_sx: Optional[float]

    def as_dict(self) -> Dict[str, object]:
        return {
            'label': self.label,
            'coordinates': dict(self.coordinates),
            'regime': self.regime,
            'points': self.points,
            'onset_e_sx': self.onset_e_sx,
            'settling_e_sx': self.settling_e_sx,
            'min_e_sx': self.min_e_sx,
            't_min_e_sx': self.t_min_e_sx,
            'min_v_sx': self.min_v_sx,
            't_min_v_sx': self.t_min_v_sx,
            'variance_windows': self.variance_windows,
            'asymptotic_e_sx': self.asymptotic_e_sx,
        }


def summarize(trajectory: Trajectory) -> RunSummary:
    if len(trajectory) == 0:
        raise InvalidParameterError('trajectory', trajectory, "Cannot summarize an empty trajectory")
    e_sx = trajectory.column('e_sx')
    v_sx = trajectory.column('v_sx')
    t = trajectory.times
    config = trajectory.config
    regime = config.params.regime if config else None
    asymptote = None
    if config is not None:
        asymptote = float(entropy_factor(asymptotic_amplitudes(config.params, config.initial), 'X'))
    return RunSummary(
        label=trajectory.label,
        coordinates=trajectory.coordinates,
        regime=regime,
        points=len(trajectory),
        onset_e_sx=onset_time(trajectory, 'e_sx'),
        settling_e_sx=settling_time(trajectory, 'e_sx'),
        min_e_sx=float(np.min(e_sx)),
        t_min_e_sx=float(t[int(np.argmin(e_sx))]),
        min_v_sx=float(np.min(v_sx)),
        t_min_v_sx=float(t[int(np.argmin(v_sx))]),
        variance_windows=len(negative_windows(trajectory, 'v_sx')),
        asymptotic_e_sx=asymptote,
    )
