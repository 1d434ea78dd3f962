"""Exception hierarchy shared across the package."""


class TwinPriceError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(TwinPriceError, ValueError):
    """A parameter set violates its documented invariants."""


class DomainError(TwinPriceError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigError(TwinPriceError):
    """A scenario configuration could not be parsed or validated."""


class NumericalError(TwinPriceError, RuntimeError):
    """Training or a solver produced a non-finite quantity."""
