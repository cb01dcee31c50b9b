"""Exception types shared across the package."""


class RydbellError(Exception):
    """Base class for all package errors."""


class ConfigurationError(RydbellError, ValueError):
    """Invalid configuration, species data, or input parameters."""


class DomainError(RydbellError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class GeometryError(RydbellError, ValueError):
    """Singular or inconsistent geometry (e.g. zero interatomic distance)."""


class NumericalError(RydbellError):
    """A numerical routine failed to converge or produced invalid output."""
