"""One online episode of the offline evaluation protocol.

Starting from an empty rating matrix, repeat until every user has rated all
of their known items:

  1. draw a user uniformly among those with unrated known items,
  2. let the policy pick one of that user's unrated known items,
  3. record the immediate regret against the noiseless ground truth,
  4. reveal a noisy rating and add it to the matrix,
  5. let the policy update (warm ALS refit, or UCB counts).
"""

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional

import numpy as np
import pandas as pd
from pydantic import Field

from core.errors import IneligibleItem, Unavailable
from core.ground_truth import GroundTruth
from core.ratings import Observation, RatingMatrix
from core.settings import FitConfig, Settings
from datagen.block_model import observe_noisy
from policies.recommenders import PolicyName, Recommender, build_recommender
from policies.selection import candidate_items
from utils.logger import get_logger

logger = get_logger(__name__)


class EpisodeConfig(Settings):
    """Policy and hyperparameters of one simulated episode."""

    policy: PolicyName
    fit: FitConfig = Field(default_factory=FitConfig)
    alpha: float = Field(0.12, ge=0, allow_inf_nan=False)
    refit_sweeps: int = Field(2, ge=1)
    seed: int = 0
    warmup_fraction: float = Field(0.0, ge=0, lt=1)
    full_refit_every: Optional[int] = Field(None, ge=1)

    @classmethod
    def from_config(cls, config: Mapping[str, Any], policy: PolicyName | str,
                    fit: Optional[FitConfig] = None, **overrides: Any) -> "EpisodeConfig":
        """Build from the `episode` section of a loaded config, with non-None overrides."""
        values = dict(config.get("episode", {}) or {})
        values.update({k: v for k, v in overrides.items() if v is not None})
        if isinstance(policy, str):
            policy = PolicyName.parse(policy)
        return cls(policy=policy, fit=fit or FitConfig.from_config(config), **values)


@dataclass(frozen=True)
class TraceStep:
    t: int
    user: int
    item: int
    reward: float
    immediate_regret: float


@dataclass
class RegretTrace:
    """Per-step log of one episode."""
    policy: str
    steps: list[TraceStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def immediate(self) -> np.ndarray:
        return np.fromiter((s.immediate_regret for s in self.steps), dtype=np.float64, count=len(self.steps))

    @property
    def cumulative(self) -> np.ndarray:
        """CumReg_t for t = 1..T."""
        return np.cumsum(self.immediate)

    @property
    def cumulative_reward(self) -> np.ndarray:
        """CumRew_t for t = 1..T (observed, noisy rewards)."""
        rewards = np.fromiter((s.reward for s in self.steps), dtype=np.float64, count=len(self.steps))
        return np.cumsum(rewards)

    @property
    def final_regret(self) -> float:
        return float(self.cumulative[-1]) if self.steps else 0.0

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([vars(s) for s in self.steps],
                             columns=["t", "user", "item", "reward", "immediate_regret"])
        frame["cumulative_regret"] = self.cumulative
        return frame


def immediate_regret(gt: GroundTruth, i: int, allowed: Iterable[int], chosen: int) -> float:
    """Best true rating among `allowed` minus the true rating of `chosen`.

    Raises:
        IneligibleItem: If `chosen` isn't in `allowed`.
        Unavailable: If any allowed cell has no ground truth.
    """
    items = candidate_items(allowed)
    if chosen not in set(items.tolist()):
        raise IneligibleItem(f"Item {chosen} is not among the allowed items of user {i}")
    if not np.all(gt.available[i, items]):
        raise Unavailable(f"Allowed items of user {i} include cells without ground truth")
    row = gt.values[i]
    return float(row[items].max() - row[chosen])


def _reveal_warmup(gt: GroundTruth, fraction: float, matrix: RatingMatrix, remaining: np.ndarray,
                   rng: np.random.Generator):
    cells = np.argwhere(gt.available)
    count = int(round(fraction * len(cells)))
    if count == 0:
        return
    picked = np.sort(rng.choice(len(cells), size=count, replace=False))
    for i, j in cells[picked]:
        matrix.insert_observation(Observation(int(i), int(j), observe_noisy(gt, int(i), int(j), rng)))
        remaining[i, j] = False
    logger.info(f"Warm-up revealed {count} of {len(cells)} known ratings")


def run_episode(gt: GroundTruth, cfg: EpisodeConfig, recommender: Optional[Recommender] = None) -> RegretTrace:
    """Play the protocol until every user has rated all of their known items.

    Args:
        gt: Ground truth; only available cells can be recommended.
        cfg: Policy, hyperparameters and seed.
        recommender: Use this recommender instead of building one from cfg.policy.

    Returns:
        The episode's RegretTrace; identical for identical (gt, cfg).
    """
    user_rng, noise_rng, warmup_rng, policy_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(4)
    )
    if recommender is None:
        recommender = build_recommender(cfg.policy, cfg.fit, cfg.alpha, cfg.refit_sweeps, gt,
                                        policy_rng, cfg.full_refit_every)

    matrix = RatingMatrix(gt.n_users, gt.n_items)
    remaining = np.array(gt.available, dtype=bool)
    if cfg.warmup_fraction > 0:
        _reveal_warmup(gt, cfg.warmup_fraction, matrix, remaining, warmup_rng)
    left = remaining.sum(axis=1)
    recommender.reset(matrix)

    trace = RegretTrace(policy=recommender.name)
    t = 0
    while True:
        active = np.flatnonzero(left)
        if active.size == 0:
            break
        t += 1
        user = int(active[user_rng.integers(active.size)])
        allowed = np.flatnonzero(remaining[user])

        selection = recommender.select(user, allowed, matrix)
        item = selection.item
        if not remaining[user, item]:
            raise IneligibleItem(f"{recommender.name} picked item {item} outside the allowed set of user {user}")

        regret = immediate_regret(gt, user, allowed, item)
        reward = observe_noisy(gt, user, item, noise_rng)
        obs = Observation(user, item, reward)
        matrix.insert_observation(obs)
        remaining[user, item] = False
        left[user] -= 1
        trace.steps.append(TraceStep(t, user, item, reward, regret))
        logger.debug(
            f"step {t}: user {user} -> item {item} (score={selection.score:.4g}, "
            f"bonus={selection.bonus_term:.4g}) regret={regret:.4g}"
        )

        recommender.observe(obs, matrix)

    logger.debug(f"{trace.policy} episode (seed {cfg.seed}) finished: {len(trace)} steps, "
                 f"cumulative regret {trace.final_regret:.4g}")
    return trace
