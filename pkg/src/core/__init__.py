"""Domain types shared by all packages: ratings, ground truth, settings, errors."""

from .errors import (
    BewareError,
    ConfigError,
    DataError,
    DimensionMismatch,
    DuplicateObservation,
    EmptyAllowedSet,
    IndexOutOfRange,
    IneligibleItem,
    InsufficientData,
    IoError,
    LengthMismatch,
    ParseError,
    SingularSystem,
    Unavailable,
)
from .ground_truth import GroundTruth
from .ratings import Observation, RatingMatrix
from .settings import FitConfig, HalfStep, Regularization, Settings

__all__ = [
    "BewareError",
    "ConfigError",
    "DataError",
    "DimensionMismatch",
    "DuplicateObservation",
    "EmptyAllowedSet",
    "FitConfig",
    "GroundTruth",
    "HalfStep",
    "IndexOutOfRange",
    "IneligibleItem",
    "InsufficientData",
    "IoError",
    "LengthMismatch",
    "Observation",
    "ParseError",
    "RatingMatrix",
    "Regularization",
    "Settings",
    "SingularSystem",
    "Unavailable",
]
