"""Exception hierarchy shared by every package.

`DataError` subclasses signal bad input data (CLI exit code 2);
`ConfigError` signals invalid settings (CLI exit code 1).
"""

from typing import Optional


class BewareError(Exception):
    """Base class for all simulator errors."""


class ConfigError(BewareError):
    """Invalid configuration value or unknown preset/policy name."""


class DataError(BewareError):
    """Input data is malformed, inconsistent or insufficient."""


class IndexOutOfRange(DataError, IndexError):
    """A user or item index exceeds the current matrix dimensions."""


class DuplicateObservation(DataError):
    """An (user, item) pair was observed twice."""


class DimensionMismatch(DataError, ValueError):
    """Factor matrices don't match the rating matrix or each other."""


class Unavailable(DataError):
    """A ground-truth cell that is masked out was read."""


class ParseError(DataError):
    """A ratings file line could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IoError(DataError, OSError):
    """A ratings file could not be read or a result file written."""


class InsufficientData(DataError):
    """Densification selected nothing usable."""


class LengthMismatch(DataError, ValueError):
    """Regret traces of different lengths were aggregated."""


class SingularSystem(BewareError, ArithmeticError):
    """A design matrix is numerically singular (only possible with lambda = 0)."""


class EmptyAllowedSet(BewareError, ValueError):
    """A selector was called with no candidate items."""


class IneligibleItem(BewareError, ValueError):
    """A candidate item was already rated by the requesting user."""
