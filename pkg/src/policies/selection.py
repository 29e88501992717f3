"""Selection results and the shared argmax rule (ties go to the lowest item index)."""

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from core.errors import EmptyAllowedSet, IneligibleItem
from core.ratings import RatingMatrix


@dataclass(frozen=True)
class Selection:
    """Chosen item with its score split into exploitation and exploration parts."""
    item: int
    score: float
    exploit_term: float
    bonus_term: float


def candidate_items(allowed: Iterable[int]) -> np.ndarray:
    """Allowed items as a sorted, de-duplicated index array.

    Raises:
        EmptyAllowedSet: If nothing is allowed.
    """
    items = np.unique(np.fromiter((int(j) for j in allowed), dtype=np.intp))
    if items.size == 0:
        raise EmptyAllowedSet("No candidate items to select from")
    return items


def check_unrated(m: RatingMatrix, i: int, items: np.ndarray):
    """Raise IneligibleItem if user i already rated one of `items`."""
    rated = np.intersect1d(items, np.asarray(m.items_of(i), dtype=np.intp))
    if rated.size:
        raise IneligibleItem(f"User {i} already rated candidate items {rated.tolist()}")


def argmax_selection(items: np.ndarray, exploit: np.ndarray, bonus: np.ndarray) -> Selection:
    """Pick the highest exploit + bonus; np.argmax keeps the first (lowest-index) maximum."""
    scores = exploit + bonus
    best = int(np.argmax(scores))
    return Selection(
        item=int(items[best]),
        score=float(scores[best]),
        exploit_term=float(exploit[best]),
        bonus_term=float(bonus[best]),
    )
