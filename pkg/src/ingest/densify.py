"""Cut a sparse ratings log down to its densest block (most-rated items, heaviest users)."""

import numpy as np
import pandas as pd

from core.errors import ConfigError, InsufficientData
from core.ground_truth import GroundTruth
from ingest.csv_loader import RawRatingsFile
from utils.logger import get_logger

logger = get_logger(__name__)


def _top_ids(ids: pd.Series, limit: int) -> list[str]:
    """Most frequent ids first; equal counts ordered by id."""
    counts = ids.value_counts().rename("count").reset_index()
    counts.columns = ["id", "count"]
    counts = counts.sort_values(["count", "id"], ascending=[False, True], kind="mergesort")
    return counts["id"].head(limit).tolist()


def densify(raw: RawRatingsFile, top_users: int, top_items: int, noise_sigma: float = 0.0) -> GroundTruth:
    """Build an evaluation ground truth from the `top_items` most-rated items and
    then the `top_users` users with most ratings among those items.

    Cells without a rating are masked out. Duplicate (user, item) pairs keep
    the last occurrence.

    Raises:
        ConfigError: If a limit is below 1.
        InsufficientData: If the selection is empty.
    """
    if top_users < 1 or top_items < 1:
        raise ConfigError(f"top_users and top_items must be >= 1, got {top_users} and {top_items}")
    frame = raw.records
    if frame.empty:
        raise InsufficientData("No ratings to densify")

    frame = frame.drop_duplicates(subset=["user_id", "item_id"], keep="last")

    items = _top_ids(frame["item_id"], top_items)
    frame = frame[frame["item_id"].isin(items)]
    users = _top_ids(frame["user_id"], top_users)
    frame = frame[frame["user_id"].isin(users)]
    if frame.empty:
        raise InsufficientData("Densification selected no ratings")

    # Drop items left without any rater after the user cut
    rated = set(frame["item_id"])
    items = [item for item in items if item in rated]

    user_pos = {u: k for k, u in enumerate(users)}
    item_pos = {j: k for k, j in enumerate(items)}
    rows = frame["user_id"].map(user_pos).to_numpy()
    cols = frame["item_id"].map(item_pos).to_numpy()

    values = np.zeros((len(users), len(items)))
    available = np.zeros((len(users), len(items)), dtype=bool)
    values[rows, cols] = frame["rating"].to_numpy(dtype=np.float64)
    available[rows, cols] = True

    gt = GroundTruth(values, available, noise_sigma=noise_sigma, user_ids=tuple(users), item_ids=tuple(items))
    logger.info(
        f"Densified {len(raw)} ratings to {gt.n_users} users x {gt.n_items} items "
        f"(fill rate {gt.fill_rate:.1%}, {1 - gt.fill_rate:.1%} missing)"
    )
    return gt
