"""Exception types shared across the package."""


class QdoError(Exception):
    """Base class for all package errors."""


class DegenerateState(QdoError):
    """A state with (numerically) zero norm was used where a physical state is required."""


class SingularConfiguration(QdoError):
    """A Coulomb denominator underflowed; the configuration sits on a collision line."""


class ParameterOutOfRange(QdoError):
    """A gate or ansatz parameter exceeds its guarded range."""


class FitFailed(QdoError):
    """A nonlinear fit could not be performed on the given data."""


class NonFinite(QdoError):
    """The training cost became NaN or infinite."""

    def __init__(self, message, step=None, params=None):
        super().__init__(message)
        self.step = step
        self.params = params


class ConfigError(QdoError):
    """A run configuration file is malformed or contains unknown keys."""
