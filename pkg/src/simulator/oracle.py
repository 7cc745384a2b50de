"""
Independent numerical paths used to cross-check the closed forms

- a pseudomode system integrated with classical fixed-step RK4
- projection and trace formulas evaluated directly on the density matrix
- a seeded random search for the minimum of the entropy sum
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy import optimize

from .exceptions import BoundViolation, InvalidParameterError, StepTooLarge
from .model import AmplitudeSet, InitialAmplitudes, SystemParams, evolve_amplitudes, propagator_g
from .spin import SpinAxis, eigenbasis, spin_operator
from .squeezing import ENTROPIC_BOUND, entropy_sum
from .state import DensityMatrix3

logger = logging.getLogger(__name__)

STABILITY_LIMIT = 0.1
BOUND_TOLERANCE = 1e-6

# Ranges for random reachable states
KAPPA_RANGE = (0.2, 2.0)
GAMMA0_RANGE = (0.0, 20.0)
THETA_RANGE = (-1.0, 1.0)
DELTA_RANGE = (-10.0, 10.0)
TIME_RANGE = (0.0, 50.0)


@dataclass(frozen=True)
class OdeConfig:
    """Fixed-step RK4 settings for the pseudomode integration"""
    dt: float = 1e-3
    t_max: float = 20.0

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameterError('dt', self.dt, "Step must be positive")
        if not self.t_max > 0:
            raise InvalidParameterError('t_max', self.t_max, "Time span must be positive")
        if self.dt > self.t_max:
            raise InvalidParameterError('dt', self.dt, f"Step exceeds the time span {self.t_max:g}")


def pseudomode_coupling(params: SystemParams, sign: int) -> float:
    """g with g^2 = gamma0 (1 +- theta) kappa / 2."""
    return math.sqrt(max(params.coupling_strength(sign), 0.0) / 4.0)


def _check_step(params: SystemParams, g: float, dt: float) -> None:
    rate = params.kappa + abs(params.delta) + g
    if dt * rate > STABILITY_LIMIT:
        raise StepTooLarge(dt, rate, STABILITY_LIMIT)


def ode_propagator(params: SystemParams, sign: int, grid: Sequence[float],
                   config: Optional[OdeConfig] = None) -> np.ndarray:
    """
    Integrate D' = -i g c, c' = -(kappa + i delta) c - i g D from D = 1, c = 0

    D(t) reproduces the closed-form propagator G+-(t). Between consecutive
    grid points the integrator takes equal substeps no longer than dt.

    Args:
        params: System parameters
        sign: +1 or -1 channel
        grid: Non-decreasing, non-negative times
        config: Step settings (defaults to OdeConfig())

    Returns:
        Complex D at each grid time

    Raises:
        StepTooLarge: If dt (kappa + |delta| + g) exceeds STABILITY_LIMIT
    """
    config = config or OdeConfig()
    times = np.asarray(grid, dtype=float)
    if times.size and (times[0] < 0 or np.any(np.diff(times) < 0)):
        raise InvalidParameterError('grid', grid, "Times must be non-negative and non-decreasing")

    g = pseudomode_coupling(params, sign)
    _check_step(params, g, config.dt)
    a = params.complex_rate
    minus_ig = -1j * g

    def derivative(d: complex, c: complex):
        return minus_ig * c, -a * c + minus_ig * d

    d, c = 1.0 + 0j, 0.0 + 0j
    now = 0.0
    out = np.empty(times.shape, dtype=complex)
    for index, target in enumerate(times):
        span = target - now
        steps = max(1, math.ceil(span / config.dt - 1e-9)) if span > 0 else 0
        h = span / steps if steps else 0.0
        for _ in range(steps):
            k1d, k1c = derivative(d, c)
            k2d, k2c = derivative(d + 0.5 * h * k1d, c + 0.5 * h * k1c)
            k3d, k3c = derivative(d + 0.5 * h * k2d, c + 0.5 * h * k2c)
            k4d, k4c = derivative(d + h * k3d, c + h * k3c)
            d += (h / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d)
            c += (h / 6.0) * (k1c + 2 * k2c + 2 * k3c + k4c)
        now = target
        out[index] = d
    return out


def ode_error(params: SystemParams, sign: int, config: Optional[OdeConfig] = None,
              grid: Optional[np.ndarray] = None) -> float:
    """max |D_ode - G_closed| over the grid (default: steps of dt up to t_max)."""
    config = config or OdeConfig()
    if grid is None:
        grid = np.arange(int(round(config.t_max / config.dt)) + 1) * config.dt
    numeric = ode_propagator(params, sign, grid, config)
    exact = propagator_g(params, sign, grid)
    return float(np.max(np.abs(numeric - exact)))


def convergence_ratio(params: SystemParams, sign: int, dt: float, t_max: float) -> float:
    """
    Error at dt over error at dt/2, both measured on the grid of step dt

    Close to 16 for a fourth-order method.
    """
    grid = np.arange(int(round(t_max / dt)) + 1) * dt
    coarse = ode_error(params, sign, OdeConfig(dt, t_max), grid)
    fine = ode_error(params, sign, OdeConfig(dt / 2.0, t_max), grid)
    logger.debug(f"ODE error {coarse:.3e} at dt={dt:g}, {fine:.3e} at dt={dt / 2:g}")
    if fine == 0.0:
        return math.inf
    return coarse / fine


def projection_probabilities(rho: DensityMatrix3, axis: Union[str, SpinAxis]) -> np.ndarray:
    """<v_k| rho |v_k> for the eigenvectors of S_axis, ordered (+1, 0, -1)."""
    v = eigenbasis(axis).vectors
    return np.real(np.einsum('ki,...ij,kj->...k', np.conj(v), rho.entries, v))


def trace_expectation(rho: DensityMatrix3, axis: Union[str, SpinAxis]):
    """Tr(rho S_axis)."""
    value = np.real(np.einsum('...ij,ji->...', rho.entries, spin_operator(axis)))
    return float(value) if np.ndim(value) == 0 else value


def trace_second_moment(rho: DensityMatrix3, axis: Union[str, SpinAxis]):
    """Tr(rho S_axis^2)."""
    s = spin_operator(axis)
    value = np.real(np.einsum('...ij,ji->...', rho.entries, s @ s))
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True, eq=False)
class ReachableState:
    """One random draw of (parameters, initial state, time) and the resulting amplitudes"""
    params: SystemParams
    initial: InitialAmplitudes
    amplitudes: AmplitudeSet

    @property
    def t(self) -> float:
        return float(self.amplitudes.t)


def random_pure_states(rng: np.random.Generator, count: int) -> np.ndarray:
    """Normalized complex Gaussian triples, shape (count, 3)."""
    raw = rng.standard_normal((count, 3)) + 1j * rng.standard_normal((count, 3))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def random_reachable_states(count: int, seed: int) -> List[ReachableState]:
    """
    States the model can actually reach, drawn reproducibly from ``seed``

    Parameters, initial amplitudes and the evaluation time are all random.
    """
    if count < 1:
        raise InvalidParameterError('count', count, "Need at least one state")
    rng = np.random.default_rng(seed)
    states = []
    for vector in random_pure_states(rng, count):
        params = SystemParams(
            kappa=float(rng.uniform(*KAPPA_RANGE)),
            gamma0=float(rng.uniform(*GAMMA0_RANGE)),
            theta=float(rng.uniform(*THETA_RANGE)),
            delta=float(rng.uniform(*DELTA_RANGE)),
        )
        initial = InitialAmplitudes(vector[0], vector[1], vector[2])
        t = float(rng.uniform(*TIME_RANGE))
        states.append(ReachableState(params, initial, evolve_amplitudes(params, initial, t)))
    return states


def stack_states(states: Sequence[ReachableState]) -> AmplitudeSet:
    """Pack single-instant draws into one array-valued AmplitudeSet."""
    return AmplitudeSet(
        t=np.array([s.amplitudes.t for s in states], dtype=float),
        dA=np.array([s.amplitudes.dA for s in states], dtype=complex),
        dB=np.array([s.amplitudes.dB for s in states], dtype=complex),
        dC=np.array([s.amplitudes.dC for s in states], dtype=complex),
        bath_weight=np.array([s.amplitudes.bath_weight for s in states], dtype=float),
    )


def _pure_amplitudes(vectors: np.ndarray) -> AmplitudeSet:
    """AmplitudeSet for pure states given in basis order [C, B, A]."""
    vectors = np.atleast_2d(vectors)
    return AmplitudeSet(
        t=np.zeros(len(vectors)),
        dA=vectors[:, 2],
        dB=vectors[:, 1],
        dC=vectors[:, 0],
        bath_weight=np.zeros(len(vectors)),
    )


@dataclass(frozen=True, eq=False)
class BoundSearchResult:
    """
    Outcome of the entropy-sum minimization

    Attributes:
        min_sum: Best value found (refined when refinement ran)
        argmin: The minimizing state in basis [C, B, A]
        sampled_min: Best value among the random samples alone
        sampled_argmin: The sampled minimizer
        samples: Number of random samples drawn
        seed: Generator seed
        refined: Whether the local polish ran
    """
    min_sum: float
    argmin: np.ndarray
    sampled_min: float
    sampled_argmin: np.ndarray
    samples: int
    seed: int
    refined: bool

    @property
    def gap(self) -> float:
        return self.min_sum - ENTROPIC_BOUND

    def as_dict(self) -> dict:
        def pairs(vector):
            return [[float(z.real), float(z.imag)] for z in vector]

        return {
            'min_sum': self.min_sum,
            'bound': ENTROPIC_BOUND,
            'gap': self.gap,
            'argmin': pairs(self.argmin),
            'sampled_min': self.sampled_min,
            'sampled_argmin': pairs(self.sampled_argmin),
            'samples': self.samples,
            'seed': self.seed,
            'refined': self.refined,
        }


def _entropy_sum_of_vector(x: np.ndarray) -> float:
    vector = x[:3] + 1j * x[3:]
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        return math.inf
    return float(entropy_sum(_pure_amplitudes(vector / norm))[0])


def _check_bound(value: float) -> None:
    if value < ENTROPIC_BOUND - BOUND_TOLERANCE:
        raise BoundViolation(value, ENTROPIC_BOUND)


def bound_search(samples: int, seed: int, extra_states: Optional[np.ndarray] = None,
                 refine: bool = True) -> BoundSearchResult:
    """
    Minimize H(S_x) + H(S_y) + H(S_z) over pure states

    Args:
        samples: Number of random states to draw
        seed: Generator seed; equal seeds give bit-identical results
        extra_states: Optional (k, 3) states in basis [C, B, A] added to the draw
        refine: Polish the best sample with Nelder-Mead

    Raises:
        BoundViolation: If any candidate falls below 2 ln 2
    """
    if samples < 1:
        raise InvalidParameterError('samples', samples, "Need at least one sample")

    rng = np.random.default_rng(seed)
    candidates = random_pure_states(rng, samples)
    if extra_states is not None:
        extra = np.atleast_2d(np.asarray(extra_states, dtype=complex))
        extra = extra / np.linalg.norm(extra, axis=1, keepdims=True)
        candidates = np.vstack([extra, candidates])

    sums = np.atleast_1d(entropy_sum(_pure_amplitudes(candidates)))
    best = int(np.argmin(sums))
    sampled_min = float(sums[best])
    sampled_argmin = candidates[best].copy()
    _check_bound(sampled_min)
    logger.info(f"Sampled minimum {sampled_min:.6f} over {len(candidates)} states")

    min_sum, argmin = sampled_min, sampled_argmin
    if refine:
        start = np.concatenate([sampled_argmin.real, sampled_argmin.imag])
        result = optimize.minimize(
            _entropy_sum_of_vector, start, method='Nelder-Mead',
            options={'xatol': 1e-10, 'fatol': 1e-13, 'maxiter': 20000, 'maxfev': 40000},
        )
        polished = float(result.fun)
        _check_bound(polished)
        if polished < min_sum:
            vector = result.x[:3] + 1j * result.x[3:]
            min_sum, argmin = polished, vector / np.linalg.norm(vector)
        logger.info(f"Refined minimum {min_sum:.9f} ({result.nit} iterations)")

    return BoundSearchResult(
        min_sum=min_sum,
        argmin=argmin,
        sampled_min=sampled_min,
        sampled_argmin=sampled_argmin,
        samples=samples,
        seed=seed,
        refined=refine,
    )
