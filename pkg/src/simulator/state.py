"""
Reduced density matrix of the atom and basis-dependent coherence
Basis order is [|C>, |B>, |A>] throughout.
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import InvalidDensityMatrix
from .model import AmplitudeSet
from .utils import first_violation, hermitian_eigenvalues

logger = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-10

BASIS_LABELS = ('C', 'B', 'A')


@dataclass(frozen=True, eq=False)
class DensityMatrix3:
    """
    3x3 density matrix, or a stack of them along a leading time axis

    Attributes:
        entries: complex array of shape (3, 3) or (N, 3, 3)
        source_time: time stamp(s) the matrix was built at
    """
    entries: np.ndarray
    source_time: Union[float, np.ndarray, None] = None
    validate: bool = True

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.shape[-2:] != (3, 3):
            raise InvalidDensityMatrix(f"Expected 3x3 entries, got shape {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)
        if self.validate:
            self._check()

    @property
    def is_stack(self) -> bool:
        return self.entries.ndim == 3

    def __len__(self) -> int:
        return self.entries.shape[0] if self.is_stack else 1

    def at(self, index: int) -> 'DensityMatrix3':
        if not self.is_stack:
            return self
        stamp = None if self.source_time is None else float(np.asarray(self.source_time)[index])
        return DensityMatrix3(self.entries[index], stamp, validate=False)

    @property
    def trace(self) -> Union[float, np.ndarray]:
        return np.real(np.trace(self.entries, axis1=-2, axis2=-1))

    def _check(self) -> None:
        m = self.entries
        times = None if self.source_time is None else np.asarray(self.source_time)

        asym = np.abs(m - np.conj(np.swapaxes(m, -1, -2))).max(axis=(-2, -1))
        bad = asym > HERMITIAN_TOLERANCE
        if np.any(bad):
            raise InvalidDensityMatrix(
                "Density matrix is not Hermitian", t=first_violation(bad, times),
                detail=f"max |rho - rho^dagger| = {float(np.max(asym)):.3g}"
            )

        trace_error = np.abs(np.trace(m, axis1=-2, axis2=-1) - 1.0)
        bad = trace_error > TRACE_TOLERANCE
        if np.any(bad):
            raise InvalidDensityMatrix(
                "Density matrix trace differs from one", t=first_violation(bad, times),
                detail=f"max |tr - 1| = {float(np.max(trace_error)):.3g}"
            )

        lowest = hermitian_eigenvalues(m)[..., 0]
        bad = lowest < -PSD_TOLERANCE
        if np.any(bad):
            raise InvalidDensityMatrix(
                "Density matrix is not positive semidefinite", t=first_violation(bad, times),
                detail=f"min eigenvalue = {float(np.min(lowest)):.3g}"
            )


def _outer(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """u v^dagger along the last axis."""
    return u[..., :, None] * np.conj(v)[..., None, :]


def density_matrix(a: AmplitudeSet, validate: bool = True) -> DensityMatrix3:
    """
    Reduced atomic state after tracing out the reservoir

    rho = |psi><psi| + w |C><C| with psi = (D_C, D_B, D_A) and w the bath weight.
    """
    psi = np.stack(np.broadcast_arrays(
        np.asarray(a.dC, dtype=complex),
        np.asarray(a.dB, dtype=complex),
        np.asarray(a.dA, dtype=complex),
    ), axis=-1)
    entries = _outer(psi, psi)
    entries[..., 0, 0] += np.asarray(a.bath_weight, dtype=float)
    return DensityMatrix3(entries, a.t, validate=validate)


def mixture_reconstruction(a: AmplitudeSet) -> np.ndarray:
    """
    The same matrix assembled as (1 - w)|phi><phi| + w|C><C|

    phi is the normalized atomic part; used to cross-check density_matrix.
    """
    psi = np.stack(np.broadcast_arrays(
        np.asarray(a.dC, dtype=complex),
        np.asarray(a.dB, dtype=complex),
        np.asarray(a.dA, dtype=complex),
    ), axis=-1)
    weight = np.asarray(a.bath_weight, dtype=float)
    norm = np.sqrt(np.real(np.sum(psi * np.conj(psi), axis=-1)))
    safe = np.where(norm > 0, norm, 1.0)
    phi = psi / safe[..., None]
    ground = np.zeros(psi.shape, dtype=complex)
    ground[..., 0] = 1.0
    return ((1.0 - weight)[..., None, None] * _outer(phi, phi)
            + weight[..., None, None] * _outer(ground, ground))


def eigenvalues(rho: DensityMatrix3) -> np.ndarray:
    """Spectrum of rho in ascending order."""
    return hermitian_eigenvalues(rho.entries)


def l1_coherence(rho: DensityMatrix3) -> Union[float, np.ndarray]:
    """Sum of |rho_ij| over the six off-diagonal entries."""
    m = np.abs(rho.entries)
    total = m.sum(axis=(-2, -1)) - np.trace(m, axis1=-2, axis2=-1)
    total = np.maximum(total, 0.0)
    return float(total) if np.ndim(total) == 0 else total

