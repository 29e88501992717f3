"""Small symmetric positive-definite systems (k <= ~10) and ellipsoid norms."""

import numpy as np
import scipy.linalg

from core.errors import SingularSystem

_EPS = np.finfo(np.float64).eps


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """Average with the transpose over the last two axes so symmetry is exact."""
    return 0.5 * (matrix + np.swapaxes(matrix, -1, -2))


def _well_conditioned(lower_diag: np.ndarray) -> np.ndarray:
    # Cholesky pivots of a rank-deficient Gram matrix can come out tiny but positive
    k = lower_diag.shape[-1]
    top = lower_diag.max(axis=-1)
    bottom = lower_diag.min(axis=-1)
    return (top > 0) & (bottom ** 2 > k * _EPS * top ** 2)


def solve_spd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b for symmetric positive (semi)definite `a`.

    Cholesky first; if it fails but `a` still has full rank, fall back to a
    least-squares solve.

    Raises:
        SingularSystem: If `a` is rank deficient.
    """
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
        if _well_conditioned(np.abs(np.diag(factor[0]))):
            return scipy.linalg.cho_solve(factor, b, check_finite=False)
    except np.linalg.LinAlgError:
        pass

    rank = np.linalg.matrix_rank(a)
    if rank < a.shape[0]:
        raise SingularSystem(f"Design matrix of size {a.shape[0]} has rank {rank}")
    x, *_ = scipy.linalg.lstsq(a, b, check_finite=False)
    return x


def solve_spd_stack(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a stack of systems a[s] x[s] = b[s]; a is (s, k, k), b is (s, k)."""
    if a.shape[0] == 0:
        return np.zeros(b.shape)
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return np.stack([solve_spd(a_s, b_s) for a_s, b_s in zip(a, b)])
    if not np.all(_well_conditioned(np.diagonal(lower, axis1=-2, axis2=-1))):
        return np.stack([solve_spd(a_s, b_s) for a_s, b_s in zip(a, b)])
    y = np.linalg.solve(lower, b[..., None])
    return np.linalg.solve(np.swapaxes(lower, -1, -2), y)[..., 0]


def inverse_quadratic_forms(a: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """w a^-1 w^T for every row w of `vectors` (clipped at 0)."""
    vectors = np.atleast_2d(vectors)
    solved = solve_spd(a, vectors.T)
    return np.clip(np.einsum("sk,ks->s", vectors, solved), 0.0, None)


def ellipsoid_widths(a: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """sqrt(w a^-1 w^T) for every row w of `vectors`."""
    return np.sqrt(inverse_quadratic_forms(a, vectors))
