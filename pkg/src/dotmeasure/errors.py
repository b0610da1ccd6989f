"""Exception types raised across the package."""


class DotMeasureError(Exception):
    """Base class for all package errors."""


class ParameterError(DotMeasureError, ValueError):
    """Invalid model parameters (negative widths, inconsistent regime, ...)."""


class StateError(DotMeasureError, ValueError):
    """A density vector does not match the expected state space or is unphysical."""


class SteadyStateError(DotMeasureError):
    """The generator has no unique steady state."""


class IntegrationError(DotMeasureError):
    """The adaptive integrator failed."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class FitError(DotMeasureError):
    """A decay-rate fit could not be performed reliably."""


class UndefinedCurrentError(DotMeasureError, ValueError):
    """A closed-form current is undefined for the given widths."""


class ConfigError(DotMeasureError):
    """Malformed or invalid run configuration."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line
