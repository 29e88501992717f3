"""The regularized objective and its closed-form per-row ridge solutions.

For a user i with rated items J(i) and item factors V fixed:

    A = V_J^T V_J + lam * w_i * Id,    u = A^-1 V_J^T R_{i,J}

with w_i = #J(i) under ALS-WR (weighted) and 1 under standard ALS. Items are
the mirror image with B(j) built from the factors of the users in I(j).
Rows with no ratings get A = lam * Id and a zero solution.
"""

import numpy as np

from core.errors import DimensionMismatch
from core.ratings import RatingMatrix
from core.settings import FitConfig, Regularization
from factorization.linalg import solve_spd, solve_spd_stack, symmetrize


def penalty_weights(counts: np.ndarray, regularization: Regularization) -> np.ndarray:
    """Per-row multiplier of lambda inside the design matrices."""
    counts = np.asarray(counts)
    if regularization == Regularization.WEIGHTED:
        return np.maximum(counts, 1).astype(np.float64)
    return np.ones(counts.shape, dtype=np.float64)


def _check_factors(U: np.ndarray, V: np.ndarray, m: RatingMatrix):
    if U.ndim != 2 or V.ndim != 2:
        raise DimensionMismatch(f"Factors must be 2-D, got {U.shape} and {V.shape}")
    if U.shape[0] != m.n_users or V.shape[0] != m.n_items:
        raise DimensionMismatch(
            f"Factors {U.shape} / {V.shape} don't match a {m.n_users}x{m.n_items} rating matrix"
        )
    if U.shape[1] != V.shape[1]:
        raise DimensionMismatch(f"Factor ranks differ: {U.shape[1]} vs {V.shape[1]}")


def objective(U: np.ndarray, V: np.ndarray, m: RatingMatrix, cfg: FitConfig) -> float:
    """zeta(U, V): squared error over S plus lam * Omega(U, V).

    Raises:
        DimensionMismatch: If the factors don't fit the matrix.
    """
    _check_factors(U, V, m)
    mask = m.observed_mask()
    residual = np.where(mask, m.dense_values() - U @ V.T, 0.0)
    loss = float(np.sum(residual ** 2))

    user_norms = np.sum(U ** 2, axis=1)
    item_norms = np.sum(V ** 2, axis=1)
    if cfg.regularization == Regularization.WEIGHTED:
        penalty = float(m.user_counts() @ user_norms + m.item_counts() @ item_norms)
    else:
        penalty = float(user_norms.sum() + item_norms.sum())
    return loss + cfg.lam * penalty


def design_matrix(fixed_rows: np.ndarray, lam: float, regularization: Regularization) -> np.ndarray:
    """k x k Gram matrix of the fixed-side rows plus the ridge term."""
    count = fixed_rows.shape[0]
    k = fixed_rows.shape[1]
    weight = penalty_weights(np.array(count), regularization)
    return symmetrize(fixed_rows.T @ fixed_rows) + lam * float(weight) * np.eye(k)


def _solve_row(idx: np.ndarray, ratings: np.ndarray, fixed: np.ndarray,
               lam: float, regularization: Regularization) -> tuple[np.ndarray, np.ndarray]:
    rows = fixed[idx]
    a = design_matrix(rows, lam, regularization)
    if idx.size == 0:
        return np.zeros(fixed.shape[1]), a
    return solve_spd(a, rows.T @ ratings), a


def user_design_matrix(i: int, V: np.ndarray, m: RatingMatrix, lam: float,
                       regularization: Regularization = Regularization.WEIGHTED) -> np.ndarray:
    """A for user i (confidence ellipsoid of U_i)."""
    idx, _ = m.row_ratings(i)
    return design_matrix(V[idx], lam, regularization)


def item_design_matrix(j: int, U: np.ndarray, m: RatingMatrix, lam: float,
                       regularization: Regularization = Regularization.WEIGHTED) -> np.ndarray:
    """B(j) for item j (confidence ellipsoid of V_j)."""
    idx, _ = m.column_ratings(j)
    return design_matrix(U[idx], lam, regularization)


def solve_user_row(i: int, V: np.ndarray, m: RatingMatrix, cfg: FitConfig) -> tuple[np.ndarray, np.ndarray]:
    """Ridge solution u for user i with V fixed, and its design matrix A.

    Raises:
        DimensionMismatch: If V doesn't have one row per item.
        SingularSystem: If A is singular (lambda = 0 with too few ratings).
    """
    if V.shape[0] != m.n_items:
        raise DimensionMismatch(f"Item factors have {V.shape[0]} rows, matrix has {m.n_items} items")
    idx, ratings = m.row_ratings(i)
    return _solve_row(idx, ratings, V, cfg.lam, cfg.regularization)


def solve_item_row(j: int, U: np.ndarray, m: RatingMatrix, cfg: FitConfig) -> tuple[np.ndarray, np.ndarray]:
    """Ridge solution v for item j with U fixed, and its design matrix B(j)."""
    if U.shape[0] != m.n_users:
        raise DimensionMismatch(f"User factors have {U.shape[0]} rows, matrix has {m.n_users} users")
    idx, ratings = m.column_ratings(j)
    return _solve_row(idx, ratings, U, cfg.lam, cfg.regularization)


def gram_stack(mask: np.ndarray, fixed: np.ndarray) -> np.ndarray:
    """Per-row Gram matrices sum_{c in row} fixed_c^T fixed_c, shape (rows, k, k)."""
    k = fixed.shape[1]
    outer = (fixed[:, :, None] * fixed[:, None, :]).reshape(fixed.shape[0], k * k)
    return symmetrize((mask.astype(np.float64) @ outer).reshape(mask.shape[0], k, k))


def _solve_side(mask: np.ndarray, values: np.ndarray, counts: np.ndarray,
                fixed: np.ndarray, cfg: FitConfig) -> np.ndarray:
    k = fixed.shape[1]
    solution = np.zeros((mask.shape[0], k))
    rated = counts > 0
    if not np.any(rated):
        return solution
    weights = penalty_weights(counts[rated], cfg.regularization)
    a = gram_stack(mask[rated], fixed) + cfg.lam * weights[:, None, None] * np.eye(k)
    rhs = values[rated] @ fixed
    solution[rated] = solve_spd_stack(a, rhs)
    return solution


def solve_users(V: np.ndarray, m: RatingMatrix, cfg: FitConfig) -> np.ndarray:
    """All user rows at once with V fixed (one ALS half-step)."""
    if V.shape[0] != m.n_items:
        raise DimensionMismatch(f"Item factors have {V.shape[0]} rows, matrix has {m.n_items} items")
    return _solve_side(m.observed_mask(), m.dense_values(), m.user_counts(), V, cfg)


def solve_items(U: np.ndarray, m: RatingMatrix, cfg: FitConfig) -> np.ndarray:
    """All item rows at once with U fixed (one ALS half-step)."""
    if U.shape[0] != m.n_users:
        raise DimensionMismatch(f"User factors have {U.shape[0]} rows, matrix has {m.n_users} users")
    return _solve_side(m.observed_mask().T, m.dense_values().T, m.item_counts(), U, cfg)
