"""Alternating least squares (ALS / ALS-WR) over the observed ratings."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.errors import DimensionMismatch
from core.ratings import RatingMatrix
from core.settings import FitConfig, HalfStep
from factorization.solvers import objective, solve_items, solve_users
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class FactorModel:
    """Estimated factors (U_hat, V_hat) of rank k and how they were fitted."""
    user_factors: np.ndarray
    item_factors: np.ndarray
    config: FitConfig
    last_objective: float
    sweeps_run: int
    finish: HalfStep = HalfStep.USERS
    objective_trace: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def rank(self) -> int:
        return self.user_factors.shape[1]

    @property
    def n_users(self) -> int:
        return self.user_factors.shape[0]

    @property
    def n_items(self) -> int:
        return self.item_factors.shape[0]

    def predict(self, i: int, items: Optional[np.ndarray] = None) -> np.ndarray:
        """Estimated ratings U_i . V_j^T for the given items (all items if None)."""
        V = self.item_factors if items is None else self.item_factors[np.asarray(items, dtype=np.intp)]
        return V @ self.user_factors[i]

    def reconstruct(self) -> np.ndarray:
        """R_hat = U_hat V_hat^T."""
        return self.user_factors @ self.item_factors.T

    def rmse(self, values: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
        """Root mean squared reconstruction error over `mask` (all cells if None)."""
        diff = self.reconstruct() - np.asarray(values, dtype=np.float64)
        if mask is not None:
            diff = diff[np.asarray(mask, dtype=bool)]
        if diff.size == 0:
            return 0.0
        return float(np.sqrt(np.mean(diff ** 2)))


def initial_item_factors(m: RatingMatrix, cfg: FitConfig, rng: np.random.Generator,
                         items: Optional[np.ndarray] = None) -> np.ndarray:
    """Small uniform values, with the first latent coordinate set to the column mean."""
    means = m.column_means()
    if items is not None:
        means = means[items]
    V = rng.uniform(-cfg.init_scale, cfg.init_scale, size=(means.shape[0], cfg.rank))
    V[:, 0] = means
    return V


def _warm_factors(warm_start: FactorModel, m: RatingMatrix, cfg: FitConfig,
                  rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    U = np.array(warm_start.user_factors, dtype=np.float64)
    V = np.array(warm_start.item_factors, dtype=np.float64)
    if U.shape[1] != cfg.rank or V.shape[1] != cfg.rank:
        raise DimensionMismatch(f"Warm start has rank {U.shape[1]}, config asks for {cfg.rank}")
    if U.shape[0] > m.n_users or V.shape[0] > m.n_items:
        raise DimensionMismatch(
            f"Warm start {U.shape[0]}x{V.shape[0]} is larger than the {m.n_users}x{m.n_items} matrix"
        )

    # Users/items appended since the warm model was fitted
    if U.shape[0] < m.n_users:
        U = np.vstack([U, np.zeros((m.n_users - U.shape[0], cfg.rank))])
    if V.shape[0] < m.n_items:
        V = np.vstack([V, np.zeros((m.n_items - V.shape[0], cfg.rank))])

    # Items that were cold (zero rows) restart from the init rule, otherwise
    # an all-zero model is a fixed point of the alternation
    cold = np.flatnonzero(~V.any(axis=1))
    if cold.size:
        V[cold] = initial_item_factors(m, cfg, rng, cold)
    return U, V


def als_fit(
    m: RatingMatrix,
    cfg: FitConfig,
    warm_start: Optional[FactorModel] = None,
    finish: HalfStep = HalfStep.USERS,
    max_sweeps: Optional[int] = None,
) -> FactorModel:
    """Fit U_hat, V_hat by alternating exact ridge half-steps.

    A sweep solves both sides; the side named by `finish` is always solved
    last. Stops after `max_sweeps` (defaults to cfg.max_sweeps) or once the
    objective changes by at most cfg.objective_tolerance * (1 + previous).

    Args:
        m: Observed ratings.
        cfg: Rank, lambda, regularization and stopping rule.
        warm_start: Previous model to start from instead of random item factors.
        finish: HalfStep.USERS (greedy / BeWARE.User) or HalfStep.ITEMS (BeWARE.Item).
        max_sweeps: Override of cfg.max_sweeps, e.g. for short warm refits.

    Raises:
        SingularSystem: If some design matrix is singular (lambda = 0).
        DimensionMismatch: If the warm start doesn't fit the matrix.
    """
    sweeps = max_sweeps if max_sweeps is not None else cfg.max_sweeps
    rng = np.random.default_rng(cfg.seed)

    if warm_start is not None:
        U, V = _warm_factors(warm_start, m, cfg, rng)
    else:
        V = initial_item_factors(m, cfg, rng)
        U = np.zeros((m.n_users, cfg.rank))

    trace = [objective(U, V, m, cfg)]

    # Solve U first so the item side sees user factors consistent with V
    if finish == HalfStep.USERS:
        U = solve_users(V, m, cfg)
        trace.append(objective(U, V, m, cfg))

    order = (HalfStep.ITEMS, HalfStep.USERS) if finish == HalfStep.USERS else (HalfStep.USERS, HalfStep.ITEMS)
    previous = trace[-1]
    sweeps_run = 0
    converged = False

    for sweep in range(1, sweeps + 1):
        for step in order:
            if step == HalfStep.USERS:
                U = solve_users(V, m, cfg)
            else:
                V = solve_items(U, m, cfg)
            trace.append(objective(U, V, m, cfg))

        sweeps_run = sweep
        current = trace[-1]
        logger.debug(f"ALS sweep {sweep}/{sweeps}: objective={current:.6g}")
        if abs(previous - current) <= cfg.objective_tolerance * (1.0 + previous):
            converged = True
            break
        previous = current

    return FactorModel(
        user_factors=U,
        item_factors=V,
        config=cfg,
        last_objective=trace[-1],
        sweeps_run=sweeps_run,
        finish=finish,
        objective_trace=trace,
        converged=converged,
    )
