"""Exception hierarchy shared by every module of the package."""


class CarmichaelImageError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(CarmichaelImageError, ValueError):
    """A size or tuning parameter is outside the supported configuration."""


class DomainError(CarmichaelImageError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class RangeError(CarmichaelImageError, ValueError):
    """An argument exceeds what the precomputed tables can handle."""


class ArithmeticOverflow(CarmichaelImageError, OverflowError):
    """A result does not fit the unsigned 64-bit working width."""


class ComplexityError(CarmichaelImageError, ValueError):
    """An enumeration would exceed its configured search budget."""


class CorruptSeriesError(CarmichaelImageError):
    """A persisted count series is unreadable, truncated or of a foreign version."""


class SinkError(CarmichaelImageError):
    """Writing a checkpoint record failed; the series on disk is still resumable."""
