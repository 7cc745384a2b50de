"""
Oracle suite behind the `verify` command
Each check compares a closed form against an independent path or a bound.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .exceptions import TimedError
from .model import (
    AmplitudeSet,
    InitialAmplitudes,
    SystemParams,
    evolve_amplitudes,
    propagator_from_root,
    propagator_g,
    q_factors,
    rate_r,
)
from .oracle import (
    STABILITY_LIMIT,
    OdeConfig,
    bound_search,
    convergence_ratio,
    ode_error,
    projection_probabilities,
    pseudomode_coupling,
    random_reachable_states,
    stack_states,
    trace_expectation,
    trace_second_moment,
)
from .runner import FIGURES, evolve, time_grid
from .spin import SpinAxis, expectation, second_moment
from .squeezing import ENTROPIC_BOUND, ENTROPY_FLOOR, entropy, heisenberg_check, shannon_entropy
from .state import density_matrix, mixture_reconstruction

logger = logging.getLogger(__name__)

EQUIVALENCE_TOLERANCE = 1e-12
BOUND_SLACK = 1e-9
ODE_TOLERANCE = 1e-6
MIN_CONVERGENCE_RATIO = 12.0
TIGHTNESS_TOLERANCE = 1e-3
BRANCH_TOLERANCE = 1e-11
IDENTITY_T_MAX = 50.0
IDENTITY_DT = 0.01


@dataclass(frozen=True)
class VerificationSettings:
    """Sizes and seeds of the oracle runs"""
    ode_dt: float = 1e-3
    ode_t_max: float = 20.0
    ode_coarse_dt: float = 1e-2
    random_states: int = 1000
    random_seed: int = 12345
    bound_samples: int = 100000
    bound_seed: int = 2024
    refine: bool = True
    figures: Tuple[str, ...] = tuple(FIGURES)


@dataclass(frozen=True)
class CheckResult:
    """
    One oracle comparison

    For error checks ``value`` is a maximum error that must not exceed
    ``tolerance``; for floor checks (``at_least``) it must reach it.
    """
    name: str
    value: float
    tolerance: float
    passed: bool
    at_least: bool = False
    detail: str = ''

    def as_dict(self) -> Dict[str, object]:
        return {
            'name': self.name,
            'value': self.value,
            'tolerance': self.tolerance,
            'comparison': '>=' if self.at_least else '<=',
            'passed': self.passed,
            'detail': self.detail,
        }

    def line(self) -> str:
        status = 'PASS' if self.passed else 'FAIL'
        op = '>=' if self.at_least else '<='
        text = f"[{status}] {self.name}: {self.value:.3e} ({op} {self.tolerance:.1e})"
        return f"{text}  {self.detail}" if self.detail else text


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def add(self, name: str, value: float, tolerance: float, at_least: bool = False,
            detail: str = '') -> CheckResult:
        if at_least:
            passed = bool(value >= tolerance)
        else:
            passed = bool(value <= tolerance)
        check = CheckResult(name, float(value), float(tolerance), passed, at_least, detail)
        self.checks.append(check)
        log = logger.debug if passed else logger.error
        log(check.line())
        return check

    def as_dict(self) -> Dict[str, object]:
        return {'passed': self.passed, 'checks': [check.as_dict() for check in self.checks]}

    def lines(self) -> List[str]:
        summary = f"{len(self.checks) - len(self.failures)}/{len(self.checks)} checks passed"
        return [check.line() for check in self.checks] + [summary]


def figure_parameter_sets(figures: Tuple[str, ...] = tuple(FIGURES)) -> List[SystemParams]:
    """Distinct SystemParams used by the figure presets, in preset order."""
    seen: List[SystemParams] = []
    for figure_id in figures:
        for config, _ in FIGURES[figure_id].cells():
            if config.params not in seen:
                seen.append(config.params)
    return seen


def entropy_mismatch(a: AmplitudeSet) -> float:
    """max over axes of |closed-form entropy - Shannon(projection)|."""
    rho = density_matrix(a)
    worst = 0.0
    for axis in SpinAxis:
        closed = np.asarray(entropy(a, axis))
        projected = np.asarray(shannon_entropy(projection_probabilities(rho, axis)))
        worst = max(worst, float(np.max(np.abs(closed - projected))))
    return worst


def moment_mismatch(a: AmplitudeSet) -> float:
    """max over axes of the closed-form vs trace-formula first and second moments."""
    rho = density_matrix(a)
    worst = 0.0
    for axis in SpinAxis:
        first = np.abs(np.asarray(expectation(a, axis)) - np.asarray(trace_expectation(rho, axis)))
        second = np.abs(np.asarray(second_moment(a, axis)) - np.asarray(trace_second_moment(rho, axis)))
        worst = max(worst, float(np.max(first)), float(np.max(second)))
    return worst


def _check_ode(report: VerificationReport, settings: VerificationSettings,
               parameter_sets: List[SystemParams]) -> None:
    config = OdeConfig(settings.ode_dt, settings.ode_t_max)
    errors = [(ode_error(params, sign, config), params, sign)
              for params in parameter_sets for sign in (1, -1)]
    worst, params, sign = max(errors, key=lambda item: item[0])
    report.add('ode_equivalence', worst, ODE_TOLERANCE,
               detail=f"worst at {params.as_dict()}, sign {sign:+d}")

    # Stiffest set the coarse step can still integrate
    def rate(item: Tuple[SystemParams, int]) -> float:
        p, s = item
        return p.kappa + abs(p.delta) + pseudomode_coupling(p, s)

    candidates = [(p, s) for p in parameter_sets for s in (1, -1)
                  if pseudomode_coupling(p, s) > 0 and rate((p, s)) * settings.ode_coarse_dt <= STABILITY_LIMIT]
    if candidates:
        params, sign = max(candidates, key=rate)
        ratio = convergence_ratio(params, sign, settings.ode_coarse_dt, settings.ode_t_max)
        report.add('ode_convergence_ratio', ratio, MIN_CONVERGENCE_RATIO, at_least=True,
                   detail=f"dt {settings.ode_coarse_dt:g} vs {settings.ode_coarse_dt / 2:g} at {params.as_dict()}")


def _check_identities(report: VerificationReport, parameter_sets: List[SystemParams]) -> None:
    grid = time_grid(IDENTITY_T_MAX, IDENTITY_DT)

    worst = 0.0
    for params in parameter_sets:
        for sign in (1, -1):
            root = rate_r(params, sign)
            if root == 0:
                continue
            forward = propagator_from_root(params.complex_rate, root, grid)
            backward = propagator_from_root(params.complex_rate, -root, grid)
            worst = max(worst, float(np.max(np.abs(forward - backward))))
    report.add('branch_independence', worst, BRANCH_TOLERANCE)

    identity = 0.0
    dark = InitialAmplitudes(1 / math.sqrt(2), -1 / math.sqrt(2), 0.0)
    for gamma0 in (0.1, 10.0):
        for delta in (0.0, 5.0, 10.0):
            parallel = SystemParams(kappa=1.0, gamma0=gamma0, theta=1.0, delta=delta)
            orthogonal = SystemParams(kappa=1.0, gamma0=gamma0, theta=0.0, delta=delta)
            identity = max(identity, float(np.max(np.abs(propagator_g(parallel, -1, grid) - 1.0))))
            identity = max(identity, float(np.max(np.abs(q_factors(orthogonal, grid)[1]))))
            a = evolve_amplitudes(parallel, dark, grid)
            identity = max(identity, float(np.max(np.abs(a.dA - dark.dA))),
                           float(np.max(np.abs(a.dB - dark.dB))))
    report.add('triviality_identities', identity, EQUIVALENCE_TOLERANCE,
               detail="G- = 1 at theta=1, Q2 = 0 at theta=0, dark state frozen")


def _check_random_states(report: VerificationReport, settings: VerificationSettings) -> AmplitudeSet:
    states = stack_states(random_reachable_states(settings.random_states, settings.random_seed))
    report.add('entropy_equivalence_random', entropy_mismatch(states), EQUIVALENCE_TOLERANCE,
               detail=f"{settings.random_states} states, seed {settings.random_seed}")
    report.add('trace_oracle_random', moment_mismatch(states), EQUIVALENCE_TOLERANCE)
    mixture = np.max(np.abs(density_matrix(states).entries - mixture_reconstruction(states)))
    report.add('mixture_reconstruction', float(mixture), EQUIVALENCE_TOLERANCE)
    return states


def _bound_margins(a: AmplitudeSet) -> Tuple[float, float]:
    lhs, rhs = heisenberg_check(a)
    total = sum(np.asarray(entropy(a, axis)) for axis in SpinAxis)
    return float(np.min(np.asarray(lhs) - np.asarray(rhs))), float(np.min(total) - ENTROPIC_BOUND)


def _check_figures(report: VerificationReport, settings: VerificationSettings,
                   random_states: Optional[AmplitudeSet]) -> None:
    heisenberg, entropic = _bound_margins(random_states) if random_states is not None else (math.inf, math.inf)
    mismatch = 0.0
    floor = math.inf
    sy_margin = math.inf
    for figure_id in settings.figures:
        for config, _ in FIGURES[figure_id].cells():
            trajectory = evolve(config)
            a = trajectory.amplitudes()
            if figure_id != 'fig8':
                mismatch = max(mismatch, entropy_mismatch(a))
            h, e = _bound_margins(a)
            heisenberg, entropic = min(heisenberg, h), min(entropic, e)
            floor = min(floor, float(np.min(trajectory.column('e_sx'))), float(np.min(trajectory.column('e_sy'))))
            sy_margin = min(sy_margin, float(np.min(trajectory.column('e_sy'))),
                            float(np.min(trajectory.column('v_sy'))))
            logger.debug(f"Checked {config.label} ({len(trajectory)} points)")

    report.add('entropy_equivalence_figures', mismatch, EQUIVALENCE_TOLERANCE)
    report.add('heisenberg_bound', heisenberg, -BOUND_SLACK, at_least=True,
               detail="min of dSx dSy - |<Sz>|/2")
    report.add('entropic_bound', entropic, -BOUND_SLACK, at_least=True,
               detail="min of H(Sx) + H(Sy) + H(Sz) - 2 ln 2")
    report.add('entropy_factor_floor', floor - ENTROPY_FLOOR, -BOUND_SLACK, at_least=True,
               detail="min of E(Sx), E(Sy) above 1 - e/sqrt(2)")
    report.add('sy_never_squeezed', sy_margin, 0.0, at_least=True,
               detail="min of E(Sy), V(Sy) over figure presets")


def _check_bound_search(report: VerificationReport, settings: VerificationSettings) -> None:
    result = bound_search(settings.bound_samples, settings.bound_seed, refine=settings.refine)
    report.add('bound_search_tightness', abs(result.gap), TIGHTNESS_TOLERANCE,
               detail=f"min {result.min_sum:.9f}, sampled {result.sampled_min:.6f}")


def _guarded(report: VerificationReport, group: str, check: Callable, *args):
    """Run one group of checks, recording a state error as a failed check"""
    try:
        return check(report, *args)
    except TimedError as e:
        report.add(f"{group}_error", math.inf, 0.0, detail=e.message)
        return None


def run_verification(settings: Optional[VerificationSettings] = None) -> VerificationReport:
    """
    Run every oracle check

    BoundViolation from the bound search propagates. A failed comparison or
    an invalid state met inside a check group is recorded as a FAIL and the
    remaining groups still run.
    """
    settings = settings or VerificationSettings()
    report = VerificationReport()
    parameter_sets = figure_parameter_sets(settings.figures)
    logger.info(f"Verifying against {len(parameter_sets)} figure parameter sets")

    _guarded(report, 'ode', _check_ode, settings, parameter_sets)
    _guarded(report, 'identities', _check_identities, parameter_sets)
    states = _guarded(report, 'random_states', _check_random_states, settings)
    _guarded(report, 'figures', _check_figures, settings, states)
    _guarded(report, 'bound_search', _check_bound_search, settings)

    level = logging.INFO if report.passed else logging.ERROR
    logger.log(level, f"{len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed")
    return report
