"""Rating-log loading and densification into an evaluation ground truth."""

from .csv_loader import RawRatingsFile, load_csv
from .densify import densify

__all__ = ["RawRatingsFile", "densify", "load_csv"]
