"""Exception types raised across the package."""


class KmvaError(Exception):
    """Base class for all kmva errors."""


class MalformedHeaderError(KmvaError, ValueError):
    """A datacube/matrix JSON header is missing keys or has invalid values."""


class DimensionMismatchError(KmvaError, ValueError):
    """Array shapes or payload sizes do not agree with the declared dimensions."""


class NonFiniteDataError(KmvaError, ValueError):
    """Input contains NaN or infinite entries."""


class NotCenteredError(KmvaError, ValueError):
    """An operation requiring centered input received uncentered data."""


class SingularMatrixError(KmvaError, ValueError):
    """A matrix that must be invertible is singular (or numerically so)."""


class ConfigError(KmvaError, ValueError):
    """Invalid run configuration.

    Parameters
    ----------
    message : str
        Human-readable description.
    flag : str, optional
        CLI flag the offending value came from, used in structured
        error output.
    """

    def __init__(self, message, flag=None):
        super().__init__(message)
        self.flag = flag
