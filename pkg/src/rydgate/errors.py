"""Exception types shared across the package."""


class RydgateError(Exception):
    """Base class for all package-specific errors."""


class PulseBoundError(RydgateError):
    """A control sample left its allowed range; carries the offending step."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class PulseFormatError(RydgateError):
    """A pulse file is malformed; carries the offending field when known."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class PulseVersionError(PulseFormatError):
    """A pulse file declares an unsupported schema version."""


class NumericError(RydgateError):
    """Non-finite values encountered in a numerical computation."""


class ConfigError(RydgateError):
    """Invalid or unknown configuration input."""


class SelectionRuleError(RydgateError):
    """Dipole-forbidden transition requested."""


class EnergyOrderError(RydgateError):
    """Spontaneous emission requested for an upward transition."""


class SeriesDomainError(RydgateError):
    """Principal quantum number below the floor of a Rydberg series."""


class RadialIntegrationError(RydgateError):
    """Numerov integration diverged before reaching the inner cutoff."""


class FitError(RydgateError):
    """A least-squares fit is singular or degenerate."""


class NonQuadraticRegimeError(RydgateError):
    """Stark shifts are outside the quadratic regime for the given fields."""
