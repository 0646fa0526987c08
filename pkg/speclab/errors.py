class SpecLabError(Exception):
    """Base class for every error raised by speclab."""


class DomainError(SpecLabError, ValueError):
    """Invalid argument, point outside the domain or unsupported domain/bc."""


class ResourceLimitError(SpecLabError):
    """Request exceeds the desk-scale limits (λ too large, too many modes)."""


class BracketError(SpecLabError, RuntimeError):
    """A zero of a Bessel function could not be bracketed."""


class UnderResolvedGridError(DomainError):
    """Quadrature grid is too coarse for the requested mode."""


class DegenerateFitError(DomainError):
    """Not enough spread in a family to fit a growth exponent."""


class NonOrthonormalError(DomainError):
    """Input modes of an extremal combination are not orthonormal."""


class ConfigError(SpecLabError, ValueError):
    """Invalid experiment configuration."""


class ReportIOError(SpecLabError, OSError):
    """Report files could not be written or read."""
