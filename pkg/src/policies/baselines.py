"""Reference strategies for checking the harness: perfect knowledge and blind guessing."""

from typing import Iterable

import numpy as np

from core.errors import Unavailable
from core.ground_truth import GroundTruth
from policies.selection import Selection, argmax_selection, candidate_items


def oracle_select(gt: GroundTruth, i: int, allowed: Iterable[int]) -> Selection:
    """Best true rating among the allowed items.

    Raises:
        EmptyAllowedSet: If `allowed` is empty.
        Unavailable: If an allowed cell has no ground truth.
    """
    items = candidate_items(allowed)
    if not np.all(gt.available[i, items]):
        raise Unavailable(f"Oracle asked about unavailable items for user {i}")
    exploit = gt.values[i, items]
    return argmax_selection(items, exploit, np.zeros_like(exploit))


def random_select(rng: np.random.Generator, allowed: Iterable[int]) -> Selection:
    """Uniformly random allowed item."""
    items = candidate_items(allowed)
    item = int(items[rng.integers(items.size)])
    return Selection(item=item, score=0.0, exploit_term=0.0, bonus_term=0.0)
