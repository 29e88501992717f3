"""Dense oracle ratings R* used by the harness to score recommendations."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from core.errors import DataError, IndexOutOfRange, IoError, Unavailable
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Immutable n_users x n_items ratings with an availability mask.

    Synthetic data is fully available; densified real data marks only the
    cells with a known rating. `noise_sigma` is the standard deviation of the
    observation channel applied when the simulator reveals a rating.
    """
    values: np.ndarray
    available: np.ndarray
    noise_sigma: float = 0.0
    user_ids: Optional[Sequence[str]] = field(default=None, repr=False)
    item_ids: Optional[Sequence[str]] = field(default=None, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        available = np.array(self.available, dtype=bool)
        if values.ndim != 2 or values.shape != available.shape:
            raise DataError(
                f"Ground truth values {values.shape} and mask {available.shape} must be equal 2-D shapes"
            )
        if not np.all(np.isfinite(values[available])):
            raise DataError("Ground truth contains non-finite available ratings")
        if self.noise_sigma < 0:
            raise DataError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        values.flags.writeable = False
        available.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "available", available)

    @classmethod
    def full(cls, values: np.ndarray, noise_sigma: float = 0.0) -> "GroundTruth":
        values = np.asarray(values, dtype=np.float64)
        return cls(values, np.ones(values.shape, dtype=bool), noise_sigma)

    @property
    def n_users(self) -> int:
        return self.values.shape[0]

    @property
    def n_items(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def fill_rate(self) -> float:
        if self.available.size == 0:
            return 0.0
        return float(self.available.mean())

    def is_available(self, i: int, j: int) -> bool:
        return bool(self.available[i, j])

    def value(self, i: int, j: int) -> float:
        """r*_{i,j}.

        Raises:
            IndexOutOfRange: If (i, j) is outside the matrix.
            Unavailable: If the cell is masked out.
        """
        if not (0 <= i < self.n_users and 0 <= j < self.n_items):
            raise IndexOutOfRange(f"Cell ({i}, {j}) outside ground truth {self.shape}")
        if not self.available[i, j]:
            raise Unavailable(f"Ground truth for user {i}, item {j} is not available")
        return float(self.values[i, j])

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Available items of user i and their true ratings."""
        items = self.allowed_items(i)
        return items, self.values[i, items]

    def allowed_items(self, i: int) -> np.ndarray:
        """Items with a known rating for user i, ascending."""
        return np.flatnonzero(self.available[i])

    def to_frame(self) -> pd.DataFrame:
        """Available cells as a user_id,item_id,rating frame."""
        users, items = np.nonzero(self.available)
        user_ids = np.asarray(self.user_ids, dtype=object) if self.user_ids is not None else None
        item_ids = np.asarray(self.item_ids, dtype=object) if self.item_ids is not None else None
        return pd.DataFrame({
            "user_id": user_ids[users] if user_ids is not None else [f"u{i}" for i in users],
            "item_id": item_ids[items] if item_ids is not None else [f"i{j}" for j in items],
            "rating": self.values[users, items],
        })

    def to_csv(self, path: str | Path) -> Path:
        """Export in the `ingest` CSV format (header user,item,rating)."""
        path = Path(path).expanduser()
        frame = self.to_frame().rename(columns={"user_id": "user", "item_id": "item"})
        try:
            frame.to_csv(path, index=False)
        except OSError as e:
            raise IoError(f"Failed to write ground truth to {path}: {e}") from e
        logger.info(f"Exported {len(frame)} ground-truth ratings to {path}")
        return path
