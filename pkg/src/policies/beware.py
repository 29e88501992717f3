"""BeWARE selectors: optimism over confidence ellipsoids of the factor estimates.

BeWARE.User scores item j for user i as

    U_i . V_j^T + alpha * sqrt(V_j A^-1 V_j^T)

where A is the user's design matrix (uncertainty on U_i, V fixed).
BeWARE.Item swaps the roles:

    U_i . V_j^T + alpha * sqrt(U_i B(j)^-1 U_i^T)

with one B(j) per candidate item (uncertainty on V_j, U fixed). The
standard-regularization variants (BeWARE.ALS.*) replace every #J / #I
weight by 1. With alpha = 0 both reduce to the greedy choice.

An item nobody has rated has V_j = 0 and B(j) = lam * Id, so BeWARE.Item
scores it alpha * |U_i| / sqrt(lam) with no exploit term. It beats a rated
item only when that bonus exceeds the rated item's estimate plus its own
(smaller) bonus; on a 1..5 rating scale that takes alpha well above the
default.
"""

from typing import Iterable

import numpy as np

from core.errors import ConfigError
from core.ratings import RatingMatrix
from core.settings import HalfStep, Regularization
from factorization.als import FactorModel
from factorization.linalg import ellipsoid_widths, solve_spd_stack
from factorization.solvers import gram_stack, penalty_weights, user_design_matrix
from policies.greedy import estimated_ratings
from policies.selection import Selection, argmax_selection, candidate_items, check_unrated
from utils.logger import get_logger

logger = get_logger(__name__)


def _check_alpha(alpha: float):
    if not np.isfinite(alpha) or alpha < 0:
        raise ConfigError(f"Exploration parameter alpha must be finite and >= 0, got {alpha}")


def beware_user_select(
    m: RatingMatrix,
    model: FactorModel,
    i: int,
    lam: float,
    alpha: float,
    allowed: Iterable[int],
    regularization: Regularization = Regularization.WEIGHTED,
) -> Selection:
    """BeWARE.User (weighted) / BeWARE.ALS.User (standard) choice for user i.

    Raises:
        EmptyAllowedSet: If `allowed` is empty.
        IneligibleItem: If user i already rated an allowed item.
        SingularSystem: If A is singular (lambda = 0 and too few ratings).
    """
    _check_alpha(alpha)
    items = candidate_items(allowed)
    check_unrated(m, i, items)
    if model.finish != HalfStep.USERS:
        logger.warning("BeWARE.User expects a factorization whose last half-step solved the users")

    exploit = estimated_ratings(model, i, items)
    if alpha == 0:
        return argmax_selection(items, exploit, np.zeros_like(exploit))

    V = model.item_factors
    a = user_design_matrix(i, V, m, lam, regularization)
    bonus = alpha * ellipsoid_widths(a, V[items])
    return argmax_selection(items, exploit, bonus)


def item_design_stack(m: RatingMatrix, U: np.ndarray, items: np.ndarray, lam: float,
                      regularization: Regularization = Regularization.WEIGHTED) -> np.ndarray:
    """B(j) for every j in `items`, shape (len(items), k, k)."""
    k = U.shape[1]
    mask = m.observed_mask()[:, items].T
    weights = penalty_weights(m.item_counts()[items], regularization)
    return gram_stack(mask, U) + lam * weights[:, None, None] * np.eye(k)


def beware_item_select(
    m: RatingMatrix,
    model: FactorModel,
    i: int,
    lam: float,
    alpha: float,
    allowed: Iterable[int],
    regularization: Regularization = Regularization.WEIGHTED,
) -> Selection:
    """BeWARE.Item (weighted) / BeWARE.ALS.Item (standard) choice for user i.

    Raises:
        EmptyAllowedSet: If `allowed` is empty.
        IneligibleItem: If user i already rated an allowed item.
        SingularSystem: If some B(j) is singular (lambda = 0).
    """
    _check_alpha(alpha)
    items = candidate_items(allowed)
    check_unrated(m, i, items)
    if model.finish != HalfStep.ITEMS:
        logger.warning("BeWARE.Item expects a factorization whose last half-step solved the items")

    exploit = estimated_ratings(model, i, items)
    if alpha == 0:
        return argmax_selection(items, exploit, np.zeros_like(exploit))

    u = model.user_factors[i]
    b = item_design_stack(m, model.user_factors, items, lam, regularization)
    solved = solve_spd_stack(b, np.broadcast_to(u, (items.size, u.size)))
    bonus = alpha * np.sqrt(np.clip(solved @ u, 0.0, None))
    return argmax_selection(items, exploit, bonus)
