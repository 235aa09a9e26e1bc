"""
Exception hierarchy for the NJPO toolkit.
Every failure category that callers need to tell apart has its own class.
"""

from typing import Optional


class NJPOError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(NJPOError, ValueError):
    """A domain value violates its type invariants."""


class BelowThresholdError(NJPOError, ValueError):
    """The pump amplitude is below the parametric threshold."""

    def __init__(self, epsilon: float, gamma: float):
        self.epsilon = epsilon
        self.gamma = gamma
        super().__init__(
            f"below parametric threshold: epsilon={epsilon:.6g} rad/s <= Gamma={gamma:.6g} rad/s"
        )


class GroundStateOnlyError(NJPOError, ValueError):
    """No oscillating solution exists at this operating point."""


class StabilityGuardError(NJPOError, ValueError):
    """The integration step is too large for the fastest rate in the problem."""


class IntegrationError(NJPOError, RuntimeError):
    """The integrator produced a non-finite state."""

    def __init__(self, message: str, step: int):
        self.step = step
        super().__init__(f"{message} (step {step})")


class AnalysisError(NJPOError):
    """Base class for signal-analysis failures."""


class AliasingError(AnalysisError, ValueError):
    """Detection detuning lies outside the Nyquist band of the record."""


class InsufficientDataError(AnalysisError, ValueError):
    """Too few samples for the requested analysis."""


class SegmentLengthError(InsufficientDataError):
    """Requested spectral segment is longer than the data allows."""


class NoLineFoundError(AnalysisError):
    """No spectral line stands above the noise floor."""


class PhaseUndefinedError(AnalysisError):
    """Field amplitude is too small for the phase to be defined."""


class FitError(AnalysisError, ValueError):
    """A fit received degenerate input or failed to converge."""


class InversionError(NJPOError, ValueError):
    """Kerr-coefficient inversion is singular."""

    def __init__(self, message: str, condition: Optional[float] = None):
        self.condition = condition
        if condition is not None:
            message = f"{message} (condition number {condition:.3g})"
        super().__init__(message)


class ConfigError(NJPOError, ValueError):
    """Base class for run-configuration errors."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigSyntaxError(ConfigError):
    """A line is not a section header, a key-value pair or a comment."""


class MissingFieldError(ConfigError):
    """A required field is absent."""


class UnitSuffixError(ConfigError):
    """A value carries an unknown or misplaced unit suffix."""


class UnknownKeyError(ConfigError):
    """A section or key is not part of the format."""


class InvariantViolationError(ConfigError):
    """Parsed values violate a domain invariant."""
