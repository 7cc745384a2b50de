"""
Custom exceptions for the V-type atom squeezing simulator
Provides detailed error context (offending time, path, parameter) for diagnostics
"""
from typing import Optional, Sequence


class SimulationError(Exception):
    """Base exception for all simulation-related errors"""

    def __init__(self, message: str, detail: Optional[str] = None):
        self.message = message
        self.detail = detail
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.detail:
            return f"{self.message}\nDetail: {self.detail}"
        return self.message


class InvalidParameterError(SimulationError):
    """Raised when a parameter, preset or option is outside its domain"""

    def __init__(self, name: str, value: object, reason: str):
        message = f"Invalid value for '{name}': {value!r}"
        super().__init__(message, detail=reason)
        self.name = name
        self.value = value
        self.reason = reason


class UnknownParameter(InvalidParameterError):
    """Raised when a sweep axis names a parameter that cannot be swept"""

    def __init__(self, name: str, allowed: Sequence[str]):
        reason = f"Sweepable parameters: {', '.join(allowed)}"
        super().__init__(name, name, reason)
        self.allowed = tuple(allowed)


class UnknownFigure(InvalidParameterError):
    """Raised when a figure id has no preset"""

    def __init__(self, figure_id: str, known: Sequence[str]):
        reason = f"Known figures: {', '.join(known)}"
        super().__init__("figure", figure_id, reason)
        self.figure_id = figure_id


class TimedError(SimulationError):
    """Base for numerical errors raised while evaluating a time grid"""

    def __init__(self, message: str, t: Optional[float] = None, detail: Optional[str] = None):
        if t is not None:
            message = f"{message} (t={t:.6g})"
        super().__init__(message, detail=detail)
        self.t = t


class InvalidStateError(TimedError):
    """Raised when amplitudes violate the single-excitation norm budget"""


class InvalidDensityMatrix(TimedError):
    """Raised when a density matrix fails Hermiticity, trace or positivity checks"""


class NonUnitProbability(TimedError):
    """Raised when projection probabilities do not sum to one"""


class NegativeRadicand(TimedError):
    """Raised when a variance comes out negative beyond round-off"""


class InvalidDistribution(TimedError):
    """Raised when an entropy is requested for something that is not a distribution"""


class StepTooLarge(SimulationError):
    """Raised when the fixed integration step is too coarse for the system rates"""

    def __init__(self, dt: float, rate: float, limit: float):
        message = f"Integration step dt={dt:g} too large for rate {rate:.4g}"
        detail = f"dt * rate = {dt * rate:.4g} exceeds {limit:g}"
        super().__init__(message, detail=detail)
        self.dt = dt
        self.rate = rate


class BoundViolation(SimulationError):
    """Raised when a sampled state falls below the entropic bound"""

    def __init__(self, value: float, bound: float):
        message = f"Entropy sum {value:.12g} falls below the bound {bound:.12g}"
        detail = "The entropic relation or its unit convention is broken"
        super().__init__(message, detail=detail)
        self.value = value
        self.bound = bound


class EmptySeries(SimulationError):
    """Raised when there is nothing to serialize or plot"""

    def __init__(self, what: str):
        super().__init__(f"No data to write: {what}")
        self.what = what


class OutputError(SimulationError):
    """Raised when an output file cannot be written or read"""

    def __init__(self, path: str, original_error: Optional[Exception] = None):
        message = f"Failed to access '{path}'"
        detail = str(original_error) if original_error else None
        super().__init__(message, detail=detail)
        self.path = path
        self.original_error = original_error


class ConfigError(SimulationError):
    """Raised when a JSON run configuration cannot be used"""

    def __init__(self, source: str, reason: str):
        super().__init__(f"Invalid configuration '{source}'", detail=reason)
        self.source = source
        self.reason = reason
