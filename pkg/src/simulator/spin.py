"""
Spin-1 operator triple of the three-level atom
Operators, eigenbases and the first and second moments built from them
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple, Union

import numpy as np

from .exceptions import InvalidParameterError, NonUnitProbability
from .model import AmplitudeSet
from .state import DensityMatrix3
from .utils import first_violation

logger = logging.getLogger(__name__)

# Outcome order used for every probability triple and CSV column
OUTCOMES: Tuple[int, int, int] = (1, 0, -1)

PROBABILITY_ROUNDOFF = 1e-12
PROBABILITY_TOLERANCE = 1e-9


class SpinAxis(str, Enum):
    X = 'X'
    Y = 'Y'
    Z = 'Z'

    @classmethod
    def parse(cls, value: Union[str, 'SpinAxis']) -> 'SpinAxis':
        if isinstance(value, SpinAxis):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise InvalidParameterError('axis', value, "Expected one of: X, Y, Z") from None


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=complex)
    array.setflags(write=False)
    return array


_SQRT_HALF = 1.0 / math.sqrt(2.0)

# Basis order [C, B, A]
_OPERATORS: Dict[SpinAxis, np.ndarray] = {
    SpinAxis.X: _frozen([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]]),
    SpinAxis.Y: _frozen([[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]]),
    SpinAxis.Z: _frozen([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]]),
}

# Rows ordered like OUTCOMES
_EIGENVECTORS: Dict[SpinAxis, np.ndarray] = {
    SpinAxis.X: _frozen([
        [0, -1j * _SQRT_HALF, _SQRT_HALF],
        [1, 0, 0],
        [0, 1j * _SQRT_HALF, _SQRT_HALF],
    ]),
    SpinAxis.Y: _frozen([
        [_SQRT_HALF, 0, -1j * _SQRT_HALF],
        [0, 1, 0],
        [_SQRT_HALF, 0, 1j * _SQRT_HALF],
    ]),
    SpinAxis.Z: _frozen([
        [_SQRT_HALF, 1j * _SQRT_HALF, 0],
        [0, 0, 1],
        [_SQRT_HALF, -1j * _SQRT_HALF, 0],
    ]),
}


@dataclass(frozen=True, eq=False)
class SpinEigenbasis:
    """
    Eigenvectors of one spin component

    Attributes:
        axis: The spin component
        vectors: (3, 3) array; row k is the eigenvector for OUTCOMES[k]
    """
    axis: SpinAxis
    vectors: np.ndarray

    def vector(self, outcome: int) -> np.ndarray:
        if outcome not in OUTCOMES:
            raise InvalidParameterError('outcome', outcome, "Expected +1, 0 or -1")
        return self.vectors[OUTCOMES.index(outcome)]

    @property
    def projectors(self) -> np.ndarray:
        """|v><v| for each outcome, shape (3, 3, 3)."""
        v = self.vectors
        return v[:, :, None] * np.conj(v)[:, None, :]


def spin_operator(axis: Union[str, SpinAxis]) -> np.ndarray:
    """Read-only 3x3 matrix of S_axis in basis [C, B, A]."""
    return _OPERATORS[SpinAxis.parse(axis)]


def eigenbasis(axis: Union[str, SpinAxis]) -> SpinEigenbasis:
    axis = SpinAxis.parse(axis)
    return SpinEigenbasis(axis, _EIGENVECTORS[axis])


def expectation(a: AmplitudeSet, axis: Union[str, SpinAxis]):
    """
    <S_axis> from the amplitudes

    <S_x> = i D_B D_A* - i D_A D_B*
    <S_y> = i D_A D_C* - i D_C D_A*
    <S_z> = i D_C D_B* - i D_B D_C*
    """
    axis = SpinAxis.parse(axis)
    dA, dB, dC = (np.asarray(v, dtype=complex) for v in (a.dA, a.dB, a.dC))
    if axis is SpinAxis.X:
        value = 1j * dB * np.conj(dA) - 1j * dA * np.conj(dB)
    elif axis is SpinAxis.Y:
        value = 1j * dA * np.conj(dC) - 1j * dC * np.conj(dA)
    else:
        value = 1j * dC * np.conj(dB) - 1j * dB * np.conj(dC)
    # The imaginary part cancels term by term
    real = np.real(value)
    return float(real) if real.ndim == 0 else real


def second_moment(a: AmplitudeSet, axis: Union[str, SpinAxis]):
    """
    <S_axis^2>: |D_A|^2 + |D_B|^2 for X, 1 - |D_B|^2 for Y, 1 - |D_A|^2 for Z
    """
    axis = SpinAxis.parse(axis)
    pa = np.abs(np.asarray(a.dA)) ** 2
    pb = np.abs(np.asarray(a.dB)) ** 2
    if axis is SpinAxis.X:
        value = pa + pb
    elif axis is SpinAxis.Y:
        value = 1.0 - pb
    else:
        value = 1.0 - pa
    return float(value) if np.ndim(value) == 0 else value


def normalize_probabilities(probs: np.ndarray, times=None) -> np.ndarray:
    """
    Clamp a probability triple into [0, 1] and fix its sum

    Sums off by more than PROBABILITY_ROUNDOFF are renormalized; beyond
    PROBABILITY_TOLERANCE the input is rejected.

    Raises:
        NonUnitProbability: If the triple does not sum to one
    """
    probs = np.clip(np.asarray(probs, dtype=float), 0.0, 1.0)
    total = probs.sum(axis=-1)
    deviation = np.abs(total - 1.0)
    bad = deviation > PROBABILITY_TOLERANCE
    if np.any(bad):
        raise NonUnitProbability(
            "Projection probabilities do not sum to one", t=first_violation(bad, times),
            detail=f"max |sum - 1| = {float(np.max(deviation)):.3g}"
        )
    drift = deviation > PROBABILITY_ROUNDOFF
    if np.any(drift):
        logger.debug(f"Renormalizing {int(np.count_nonzero(drift))} probability triple(s)")
        probs = np.where(np.asarray(drift)[..., None], probs / total[..., None], probs)
    return probs


def probabilities(rho: DensityMatrix3, axis: Union[str, SpinAxis]) -> np.ndarray:
    """
    Outcome probabilities Tr(rho P_k) for the eigenprojectors of S_axis

    Returns:
        Array (..., 3) ordered (+1, 0, -1)
    """
    basis = eigenbasis(axis)
    raw = np.real(np.einsum('...ij,kji->...k', rho.entries, basis.projectors))
    times = None if rho.source_time is None else np.asarray(rho.source_time)
    return normalize_probabilities(raw, times)
