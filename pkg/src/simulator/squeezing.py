"""
Variance and entropy squeezing diagnostics of the atomic spin components
Entropies are in nats throughout.
"""
import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Dict, Tuple, Union

import numpy as np

from .exceptions import InvalidDistribution, NegativeRadicand
from .model import AmplitudeSet
from .spin import SpinAxis, expectation, normalize_probabilities, second_moment
from .state import density_matrix, l1_coherence
from .utils import first_violation

logger = logging.getLogger(__name__)

ENTROPY_FLOOR = 1.0 - math.e / math.sqrt(2.0)
ENTROPIC_BOUND = 2.0 * math.log(2.0)

RADICAND_ROUNDOFF = 1e-12
RADICAND_TOLERANCE = 1e-9
DISTRIBUTION_TOLERANCE = 1e-9

SQUEEZING_AXES = (SpinAxis.X, SpinAxis.Y)


@dataclass(frozen=True)
class SqueezingRecord:
    """
    Every diagnostic at one instant

    Attributes:
        t: Time
        d_a, d_b, d_c: Amplitudes of |A>, |B>, |C>
        bath_weight: Population carried by the reservoir
        e_sx, e_sy: Entropy squeezing factors
        v_sx, v_sy: Variance squeezing factors
        h_sx, h_sy, h_sz: Shannon entropies of the spin components
        std_sx, std_sy: Standard deviations of S_x and S_y
        sz_expect: Atomic inversion <S_z>
        entropy_sum: H(S_x) + H(S_y) + H(S_z)
        coherence: l1-norm coherence in basis [C, B, A]
    """
    t: float
    d_a: complex
    d_b: complex
    d_c: complex
    bath_weight: float
    e_sx: float
    e_sy: float
    v_sx: float
    v_sy: float
    h_sx: float
    h_sy: float
    h_sz: float
    std_sx: float
    std_sy: float
    sz_expect: float
    entropy_sum: float
    coherence: float

    def as_dict(self) -> Dict[str, object]:
        return asdict(self)


RECORD_FIELDS: Tuple[str, ...] = tuple(f.name for f in fields(SqueezingRecord))


def _as_result(value):
    return float(value) if np.ndim(value) == 0 else value


def _times(a: AmplitudeSet):
    return None if a.t is None else np.asarray(a.t, dtype=float)


def std_dev(a: AmplitudeSet, axis: Union[str, SpinAxis]):
    """
    Standard deviation sqrt(<S^2> - <S>^2) of S_x or S_y

    Raises:
        NegativeRadicand: If the variance is negative beyond round-off
    """
    axis = SpinAxis.parse(axis)
    radicand = np.asarray(second_moment(a, axis) - np.asarray(expectation(a, axis)) ** 2)
    bad = radicand < -RADICAND_TOLERANCE
    if np.any(bad):
        raise NegativeRadicand(
            f"Negative variance for S_{axis.value.lower()}", t=first_violation(bad, _times(a)),
            detail=f"min radicand = {float(np.min(radicand)):.3g}"
        )
    if np.any(radicand < -RADICAND_ROUNDOFF):
        logger.warning(f"Clamping variance of S_{axis.value.lower()} above round-off level")
    return _as_result(np.sqrt(np.maximum(radicand, 0.0)))


def variance_factor(a: AmplitudeSet, axis: Union[str, SpinAxis]):
    """V(S_axis) = Delta S_axis - sqrt(|<S_z>|/2); negative means variance squeezing."""
    spread = np.asarray(std_dev(a, axis))
    reference = np.sqrt(np.abs(np.asarray(expectation(a, SpinAxis.Z))) / 2.0)
    return _as_result(spread - reference)


def shannon_entropy(probs) -> Union[float, np.ndarray]:
    """
    -sum p ln p over the last axis, with 0 ln 0 = 0

    Raises:
        InvalidDistribution: If entries are negative or do not sum to one
    """
    p = np.asarray(probs, dtype=float)
    if np.any(p < -RADICAND_ROUNDOFF):
        raise InvalidDistribution("Probabilities must be non-negative", detail=f"min = {float(np.min(p)):.3g}")
    deviation = np.abs(p.sum(axis=-1) - 1.0)
    if np.any(deviation > DISTRIBUTION_TOLERANCE):
        raise InvalidDistribution(
            "Probabilities must sum to one", detail=f"max |sum - 1| = {float(np.max(deviation)):.3g}"
        )
    p = np.clip(p, 0.0, 1.0)
    safe = np.where(p > 0.0, p, 1.0)
    terms = np.where(p > 0.0, -p * np.log(safe), 0.0)
    return _as_result(terms.sum(axis=-1))


def closed_form_probabilities(a: AmplitudeSet, axis: Union[str, SpinAxis]) -> np.ndarray:
    """
    Outcome probabilities of S_axis straight from the amplitudes

    X: (m + <S_x>)/2, 1 - |D_A|^2 - |D_B|^2, (m - <S_x>)/2 with m = |D_A|^2 + |D_B|^2
    Y: (m + <S_y>)/2, |D_B|^2, (m - <S_y>)/2 with m = 1 - |D_B|^2
    Z: (m + <S_z>)/2, |D_A|^2, (m - <S_z>)/2 with m = 1 - |D_A|^2

    Returns:
        Array (..., 3) ordered (+1, 0, -1)
    """
    axis = SpinAxis.parse(axis)
    moment = np.asarray(second_moment(a, axis))
    mean = np.asarray(expectation(a, axis))
    middle = 1.0 - moment
    probs = np.stack(np.broadcast_arrays((moment + mean) / 2.0, middle, (moment - mean) / 2.0), axis=-1)
    return normalize_probabilities(probs, _times(a))


def entropy(a: AmplitudeSet, axis: Union[str, SpinAxis]):
    """H(S_axis) in nats from the closed-form outcome probabilities."""
    return shannon_entropy(closed_form_probabilities(a, axis))


def entropy_factor(a: AmplitudeSet, axis: Union[str, SpinAxis]):
    """
    E(S_axis) = exp(H(S_axis)) - e / sqrt(exp(H(S_z)))

    Negative values certify entropy squeezing; the lowest reachable value is
    ENTROPY_FLOOR.
    """
    h = np.asarray(entropy(a, axis))
    h_z = np.asarray(entropy(a, SpinAxis.Z))
    return _as_result(np.exp(h) - math.e / np.sqrt(np.exp(h_z)))


def heisenberg_check(a: AmplitudeSet):
    """(Delta S_x Delta S_y, |<S_z>|/2); the first never falls below the second."""
    lhs = np.asarray(std_dev(a, SpinAxis.X)) * np.asarray(std_dev(a, SpinAxis.Y))
    rhs = np.abs(np.asarray(expectation(a, SpinAxis.Z))) / 2.0
    return _as_result(lhs), _as_result(rhs)


def entropy_sum(a: AmplitudeSet):
    total = sum(np.asarray(entropy(a, axis)) for axis in SpinAxis)
    return _as_result(total)


def uncertainty_product(a: AmplitudeSet):
    """exp(H_x) exp(H_y) exp(H_z); at least 4 whenever entropy_sum >= 2 ln 2."""
    return _as_result(np.exp(np.asarray(entropy_sum(a))))


def observables(a: AmplitudeSet) -> Dict[str, np.ndarray]:
    """
    Every SqueezingRecord field evaluated along ``a``

    Args:
        a: Amplitudes at one time or along a grid

    Returns:
        Mapping from RECORD_FIELDS names to 1-D arrays
    """
    def column(value, dtype=float):
        return np.atleast_1d(np.asarray(value, dtype=dtype))

    h = {axis: column(entropy(a, axis)) for axis in SpinAxis}
    std = {axis: column(std_dev(a, axis)) for axis in SQUEEZING_AXES}
    sz = column(expectation(a, SpinAxis.Z))
    reference_v = np.sqrt(np.abs(sz) / 2.0)
    reference_e = math.e / np.sqrt(np.exp(h[SpinAxis.Z]))
    coherence = column(l1_coherence(density_matrix(a)))

    size = coherence.size
    return {
        't': np.broadcast_to(column(a.t), (size,)).copy(),
        'd_a': np.broadcast_to(column(a.dA, complex), (size,)).copy(),
        'd_b': np.broadcast_to(column(a.dB, complex), (size,)).copy(),
        'd_c': np.broadcast_to(column(a.dC, complex), (size,)).copy(),
        'bath_weight': np.broadcast_to(column(a.bath_weight), (size,)).copy(),
        'e_sx': np.exp(h[SpinAxis.X]) - reference_e,
        'e_sy': np.exp(h[SpinAxis.Y]) - reference_e,
        'v_sx': std[SpinAxis.X] - reference_v,
        'v_sy': std[SpinAxis.Y] - reference_v,
        'h_sx': h[SpinAxis.X],
        'h_sy': h[SpinAxis.Y],
        'h_sz': h[SpinAxis.Z],
        'std_sx': std[SpinAxis.X],
        'std_sy': std[SpinAxis.Y],
        'sz_expect': sz,
        'entropy_sum': h[SpinAxis.X] + h[SpinAxis.Y] + h[SpinAxis.Z],
        'coherence': coherence,
    }


def record(a: AmplitudeSet) -> SqueezingRecord:
    """SqueezingRecord for a single-instant AmplitudeSet."""
    columns = observables(a)
    values = {}
    for name in RECORD_FIELDS:
        item = columns[name][0]
        values[name] = complex(item) if name in ('d_a', 'd_b', 'd_c') else float(item)
    return SqueezingRecord(**values)
