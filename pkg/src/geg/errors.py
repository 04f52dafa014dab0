"""Exception hierarchy shared across the package."""


class GEGError(Exception):
    """Base class for all package errors."""


class DomainError(GEGError, ValueError):
    """An argument lies outside the domain of a function or type."""


class ConvergenceError(GEGError, ArithmeticError):
    """A numerical iteration failed to reach its tolerance."""


class DegenerateStepError(GEGError, ArithmeticError):
    """An update annihilated (or blew up) every weight; usually eta is too large."""


class StepError(GEGError):
    """A backtest failed at a given period; wraps the underlying error."""

    def __init__(self, period, cause):
        super().__init__(f"period {period}: {cause}")
        self.period = period
        self.cause = cause


class DataError(GEGError, ValueError):
    """Malformed or invalid input data."""


class ConfigError(GEGError, ValueError):
    """Invalid run configuration."""
