"""Greedy.ALS / Greedy.ALS-WR: recommend the largest estimated rating."""

from typing import Iterable

import numpy as np

from factorization.als import FactorModel
from policies.selection import Selection, argmax_selection, candidate_items


def estimated_ratings(model: FactorModel, i: int, items: np.ndarray) -> np.ndarray:
    """U_hat_i . V_hat_j^T for every candidate j."""
    return model.item_factors[items] @ model.user_factors[i]


def greedy_select(model: FactorModel, i: int, allowed: Iterable[int]) -> Selection:
    """Argmax of the estimated rating over the allowed items.

    Raises:
        EmptyAllowedSet: If `allowed` is empty.
    """
    items = candidate_items(allowed)
    exploit = estimated_ratings(model, i, items)
    return argmax_selection(items, exploit, np.zeros_like(exploit))
