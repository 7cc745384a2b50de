"""
Closed-form amplitude dynamics of a V-type atom in a dissipative cavity

The two excited levels |A>, |B> share one ground level |C> and couple to a
single cavity mode that leaks into a Lorentzian continuum. The symmetric and
antisymmetric combinations D+- = D_A +- D_B evolve independently with the
propagators G+-(t); D_C never changes.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .exceptions import InvalidParameterError, InvalidStateError
from .utils import first_violation

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# sinhc(z) switches to its Taylor series below this |z|
SERIES_THRESHOLD = 1e-2
SERIES_TERMS = 8

NORM_TOLERANCE = 1e-12
INPUT_NORM_TOLERANCE = 1e-6
BATH_TOLERANCE = 1e-9

# Alternate spellings accepted in run files and on the command line
CONVENTION_ALIASES = {'EQ31': 'B_SIN', 'EQ33': 'B_COS'}
PRESET_ALIASES = {'S2_EQ33': 'S2_B_COS'}


@dataclass(frozen=True)
class SystemParams:
    """
    Physical constants of one run

    Attributes:
        kappa: Spectral width of the Lorentzian reservoir (sets the time unit)
        gamma0: Excited-state decay coefficient
        theta: Spontaneously generated interference parameter in [-1, 1]
        delta: Atom-cavity detuning
    """
    kappa: float = 1.0
    gamma0: float = 0.0
    theta: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ('kappa', 'gamma0', 'theta', 'delta'):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameterError(name, value, "Must be a finite number")
        if self.kappa <= 0:
            raise InvalidParameterError('kappa', self.kappa, "Spectral width must be positive")
        if self.gamma0 < 0:
            raise InvalidParameterError('gamma0', self.gamma0, "Decay coefficient must be non-negative")
        if abs(self.theta) > 1:
            raise InvalidParameterError('theta', self.theta, "SGI parameter must lie in [-1, 1]")

    @property
    def is_markovian(self) -> bool:
        """Weak cavity-environment coupling: kappa >= 2 gamma0."""
        return self.kappa >= 2.0 * self.gamma0

    @property
    def regime(self) -> str:
        return 'markovian' if self.is_markovian else 'non-markovian'

    @property
    def complex_rate(self) -> complex:
        """kappa + i delta, the combination every propagator is built from."""
        return complex(self.kappa, self.delta)

    def coupling_strength(self, sign: int) -> float:
        """2 gamma0 (1 +- theta) kappa, the discriminant shift of channel +-."""
        _check_sign(sign)
        return 2.0 * self.gamma0 * (1.0 + sign * self.theta) * self.kappa

    def updated(self, **changes: float) -> 'SystemParams':
        return replace(self, **changes)

    def as_dict(self) -> Dict[str, float]:
        return {'kappa': self.kappa, 'gamma0': self.gamma0,
                'theta': self.theta, 'delta': self.delta}


class Convention(str, Enum):
    """How (alpha, beta) map onto (D_A, D_B, D_C)"""
    B_SIN = 'B_SIN'   # (cos a, sin a sin b, sin a cos b)
    B_COS = 'B_COS'   # (cos a, sin a cos b, sin a sin b)

    @classmethod
    def names(cls) -> Tuple[str, ...]:
        """Accepted spellings, aliases included"""
        return tuple(c.value for c in cls) + tuple(CONVENTION_ALIASES)

    @classmethod
    def parse(cls, value: Union[str, 'Convention']) -> 'Convention':
        try:
            key = str(value.value if isinstance(value, Convention) else value).upper()
            return cls(CONVENTION_ALIASES.get(key, key))
        except ValueError:
            raise InvalidParameterError(
                'convention', value, f"Expected one of: {', '.join(cls.names())}"
            ) from None


@dataclass(frozen=True)
class AngleSpec:
    """Angle parametrization of an initial state"""
    alpha: float
    beta: float
    convention: Convention = Convention.B_SIN


@dataclass(frozen=True)
class InitialAmplitudes:
    """Pure initial atomic state D_A(0)|A> + D_B(0)|B> + D_C(0)|C>"""
    dA: complex
    dB: complex
    dC: complex
    angles: Optional[AngleSpec] = field(default=None, compare=False)

    def __post_init__(self):
        for name in ('dA', 'dB', 'dC'):
            object.__setattr__(self, name, complex(getattr(self, name)))
        norm = abs(self.dA) ** 2 + abs(self.dB) ** 2 + abs(self.dC) ** 2
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise InvalidParameterError(
                'amplitudes', (self.dA, self.dB, self.dC),
                f"Initial state must be normalized (norm = {norm:.15g})"
            )

    @classmethod
    def from_pairs(cls, pairs, renormalize: bool = False) -> 'InitialAmplitudes':
        """
        Build from [[re, im], [re, im], [re, im]] in (A, B, C) order

        With ``renormalize`` a norm within INPUT_NORM_TOLERANCE of one is
        rescaled to one (typed-in values such as 0.7071).
        """
        try:
            values = [complex(float(re), float(im)) for re, im in pairs]
        except (TypeError, ValueError) as e:
            raise InvalidParameterError('amplitudes', pairs, f"Expected three [re, im] pairs: {e}") from None
        if len(values) != 3:
            raise InvalidParameterError('amplitudes', pairs, "Expected exactly three [re, im] pairs")
        if renormalize:
            norm = sum(abs(v) ** 2 for v in values)
            if abs(norm - 1.0) <= INPUT_NORM_TOLERANCE:
                values = [v / math.sqrt(norm) for v in values]
        return cls(*values)

    def as_tuple(self) -> Tuple[complex, complex, complex]:
        return (self.dA, self.dB, self.dC)


@dataclass(frozen=True, eq=False)
class AmplitudeSet:
    """
    Amplitudes at one time or along a time grid

    Scalar fields describe one instant; array fields describe a trajectory
    sampled at the matching entries of ``t``.
    """
    t: ArrayLike
    dA: ArrayLike
    dB: ArrayLike
    dC: ArrayLike
    bath_weight: ArrayLike

    @property
    def atomic_norm(self) -> ArrayLike:
        return np.abs(self.dA) ** 2 + np.abs(self.dB) ** 2 + np.abs(self.dC) ** 2

    def __len__(self) -> int:
        return int(np.size(self.t))

    def at(self, index: int) -> 'AmplitudeSet':
        """Single-instant view of a trajectory."""
        def pick(value):
            array = np.asarray(value)
            return array[index] if array.ndim else array[()]

        return AmplitudeSet(
            t=float(pick(self.t)),
            dA=complex(pick(self.dA)),
            dB=complex(pick(self.dB)),
            dC=complex(pick(self.dC)),
            bath_weight=float(pick(self.bath_weight)),
        )


def _check_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise InvalidParameterError('sign', sign, "Channel sign must be +1 or -1")


def rate_r(params: SystemParams, sign: int) -> complex:
    """
    R+- = sqrt((kappa + i delta)^2 - 2 gamma0 (1 +- theta) kappa)

    Principal branch. Either branch gives the same propagator because cosh
    and sinhc are even.
    """
    a = params.complex_rate
    return complex(np.sqrt(complex(a * a - params.coupling_strength(sign))))


def characteristic_roots(params: SystemParams, sign: int) -> Tuple[complex, complex]:
    """Exponents lambda = (-(kappa + i delta) +- R)/2 of channel +-."""
    a = params.complex_rate
    root = rate_r(params, sign)
    return ((-a + root) / 2.0, (-a - root) / 2.0)


def sinhc_series(z: ArrayLike) -> np.ndarray:
    """sinh(z)/z from its first SERIES_TERMS Taylor terms (Horner form)."""
    z2 = np.asarray(z, dtype=complex) ** 2
    total = np.ones_like(z2)
    for k in range(SERIES_TERMS - 1, 0, -1):
        total = 1.0 + z2 * total / ((2 * k) * (2 * k + 1))
    return total


def sinhc(z: ArrayLike) -> np.ndarray:
    """sinh(z)/z with the removable singularity at z = 0 filled in."""
    z = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(z)
    small = np.abs(flat) < SERIES_THRESHOLD
    out = np.empty_like(flat)
    out[small] = sinhc_series(flat[small])
    big = ~small
    out[big] = np.sinh(flat[big]) / flat[big]
    if z.ndim == 0:
        return complex(out[0])
    return out.reshape(z.shape)


def propagator_from_root(a: complex, root: complex, t: ArrayLike, method: str = 'auto') -> ArrayLike:
    """
    G(t) = exp(-a t/2) [cosh(R t/2) + (a t/2) sinhc(R t/2)] for a given root R

    Args:
        a: kappa + i delta
        root: Either square root R of a^2 - 2 gamma0 (1 +- theta) kappa
        t: Time or array of times (non-negative)
        method: 'series' keeps the Taylor form everywhere, 'direct' the
            exponential form everywhere, 'auto' picks by SERIES_THRESHOLD

    Returns:
        Complex propagator values with the shape of ``t``
    """
    if method not in ('auto', 'series', 'direct'):
        raise InvalidParameterError('method', method, "Expected 'auto', 'series' or 'direct'")

    times = np.asarray(t, dtype=float)
    flat = np.atleast_1d(times)
    half = root * flat / 2.0

    if method == 'series':
        use_series = np.ones(flat.shape, dtype=bool)
    elif method == 'direct':
        use_series = np.zeros(flat.shape, dtype=bool)
    else:
        use_series = np.abs(half) < SERIES_THRESHOLD

    out = np.empty(flat.shape, dtype=complex)

    ts = flat[use_series]
    hs = half[use_series]
    out[use_series] = np.exp(-a * ts / 2.0) * (np.cosh(hs) + (a * ts / 2.0) * sinhc_series(hs))

    # Same function in exponential form; Re(R) <= kappa keeps both exponents bounded
    direct = ~use_series
    td = flat[direct]
    if direct.any() and root == 0:
        raise InvalidParameterError('root', root, "The exponential form is singular at R = 0")
    ratio = a / root if direct.any() else 0.0
    grow = np.exp((root - a) * td / 2.0)
    fall = np.exp(-(root + a) * td / 2.0)
    out[direct] = 0.5 * ((1.0 + ratio) * grow + (1.0 - ratio) * fall)

    # Real a with real R^2 gives a real G; drop the round-off imaginary part
    a, root = complex(a), complex(root)
    if a.imag == 0.0 and (root * root).imag == 0.0:
        out = out.real.astype(complex)

    if times.ndim == 0:
        return complex(out[0])
    return out.reshape(times.shape)


def propagator_g(params: SystemParams, sign: int, t: ArrayLike) -> ArrayLike:
    """
    Channel propagator G+-(t), with D+-(t) = G+-(t) D+-(0)

    Args:
        params: System parameters
        sign: +1 for the symmetric channel, -1 for the antisymmetric one
        t: Non-negative time or array of times

    Returns:
        Complex G+-(t) with the shape of ``t``
    """
    if np.any(np.asarray(t) < 0):
        raise InvalidParameterError('t', t, "Time must be non-negative")
    return propagator_from_root(params.complex_rate, rate_r(params, sign), t)


def q_factors(params: SystemParams, t: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """(Q1, Q2) = ((G+ + G-)/2, (G+ - G-)/2)."""
    g_plus = propagator_g(params, 1, t)
    g_minus = propagator_g(params, -1, t)
    return (g_plus + g_minus) / 2.0, (g_plus - g_minus) / 2.0


def _amplitude_set(t: ArrayLike, dA, dB, dC) -> AmplitudeSet:
    norm = np.abs(dA) ** 2 + np.abs(dB) ** 2 + np.abs(dC) ** 2
    bath = 1.0 - norm
    too_large = bath < -BATH_TOLERANCE
    if np.any(too_large):
        raise InvalidStateError(
            "Atomic population exceeds one", t=first_violation(too_large, np.asarray(t)),
            detail=f"max norm = {float(np.max(norm)):.15g}"
        )
    bath = np.clip(bath, 0.0, 1.0)
    if np.ndim(bath) == 0:
        bath = float(bath)
    return AmplitudeSet(t=t, dA=dA, dB=dB, dC=dC, bath_weight=bath)


def evolve_amplitudes(params: SystemParams, init: InitialAmplitudes, t: ArrayLike) -> AmplitudeSet:
    """
    Amplitudes at time(s) t for the given initial state

    D_A(t) = Q1 D_A(0) + Q2 D_B(0), D_B(t) = Q2 D_A(0) + Q1 D_B(0),
    D_C(t) = D_C(0); the bath carries the remaining population.
    """
    q1, q2 = q_factors(params, t)
    dA = q1 * init.dA + q2 * init.dB
    dB = q2 * init.dA + q1 * init.dB
    if np.ndim(dA):
        dC = np.full(np.shape(dA), init.dC, dtype=complex)
    else:
        dA, dB, dC = complex(dA), complex(dB), init.dC
    times = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    return _amplitude_set(times, dA, dB, dC)


def asymptotic_amplitudes(params: SystemParams, init: InitialAmplitudes) -> AmplitudeSet:
    """
    The t -> infinity limit of evolve_amplitudes

    A channel with gamma0 (1 +- theta) = 0 never decays (G = 1); every other
    channel has both exponents strictly in the left half-plane and G -> 0.
    """
    limits = [0.0 if params.coupling_strength(sign) > 0 else 1.0 for sign in (1, -1)]
    q1 = (limits[0] + limits[1]) / 2.0
    q2 = (limits[0] - limits[1]) / 2.0
    dA = q1 * init.dA + q2 * init.dB
    dB = q2 * init.dA + q1 * init.dB
    return _amplitude_set(math.inf, complex(dA), complex(dB), init.dC)


def amplitudes_from_angles(alpha: float, beta: float,
                           convention: Union[str, Convention] = Convention.B_SIN) -> InitialAmplitudes:
    """
    Initial state from the angle parametrization

    B_SIN: (cos a, sin a sin b, sin a cos b); B_COS: (cos a, sin a cos b, sin a sin b),
    both in (D_A, D_B, D_C) order.
    """
    convention = Convention.parse(convention)
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    if convention is Convention.B_SIN:
        dB, dC = sa * sb, sa * cb
    else:
        dB, dC = sa * cb, sa * sb
    return InitialAmplitudes(ca, dB, dC, angles=AngleSpec(alpha, beta, convention))


PRESET_ANGLES: Dict[str, AngleSpec] = {
    'S1': AngleSpec(math.pi / 4, 0.0, Convention.B_SIN),
    'S2': AngleSpec(math.pi / 2.5, math.pi / 10, Convention.B_SIN),
    'S2_B_COS': AngleSpec(math.pi / 2.5, math.pi / 10, Convention.B_COS),
}


def preset(name: str) -> InitialAmplitudes:
    """
    Named initial state

    S1 = (|A> + |C>)/sqrt(2); S2 uses alpha = pi/2.5, beta = pi/10 with the
    B_SIN mapping; S2_B_COS is the same angles with the B_COS mapping.
    """
    key = str(name).upper()
    key = PRESET_ALIASES.get(key, key)
    if key not in PRESET_ANGLES:
        raise InvalidParameterError('preset', name, f"Known presets: {', '.join(PRESET_ANGLES)}")
    angles = PRESET_ANGLES[key]
    return amplitudes_from_angles(angles.alpha, angles.beta, angles.convention)
