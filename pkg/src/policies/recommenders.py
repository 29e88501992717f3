"""Stateful recommenders driving the selectors inside an online episode."""

from enum import Enum
from typing import Iterable, Optional

import numpy as np

from core.errors import ConfigError
from core.ground_truth import GroundTruth
from core.ratings import Observation, RatingMatrix
from core.settings import FitConfig, HalfStep, Regularization
from factorization.als import FactorModel, als_fit
from policies.baselines import oracle_select, random_select
from policies.beware import beware_item_select, beware_user_select
from policies.greedy import greedy_select
from policies.selection import Selection
from policies.ucb import UcbArmStats, ucb1_select, update_ucb
from utils.logger import get_logger

logger = get_logger(__name__)


class PolicyName(str, Enum):
    """Strategies the simulator can run."""
    GREEDY_ALS = "greedy-als"
    GREEDY_ALS_WR = "greedy-als-wr"
    UCB_ALL_USERS = "ucb-all-users"
    BEWARE_USER = "beware-user"
    BEWARE_USER_ALS = "beware-als-user"
    BEWARE_ITEM = "beware-item"
    BEWARE_ITEM_ALS = "beware-als-item"
    ORACLE = "oracle"
    RANDOM = "random"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def uses_factorization(self) -> bool:
        return self in _FACTOR_POLICIES

    @classmethod
    def parse(cls, text: str) -> "PolicyName":
        """Accept CLI names ('beware-item'), labels ('BeWARE.Item') or enum names ('BeWAREItem')."""
        key = text.strip().lower().replace("_", "-")
        for policy in cls:
            aliases = {
                policy.value,
                policy.label.lower(),
                policy.label.lower().replace(".", "-"),
                policy.name.lower().replace("_", "-"),
                _COMPACT[policy].lower(),
            }
            if key in aliases:
                return policy
        names = ", ".join(p.value for p in cls)
        raise ConfigError(f"Unknown policy '{text}'. Choose from: {names}")


_LABELS = {
    PolicyName.GREEDY_ALS: "Greedy.ALS",
    PolicyName.GREEDY_ALS_WR: "Greedy.ALS-WR",
    PolicyName.UCB_ALL_USERS: "UCB.on.all.users",
    PolicyName.BEWARE_USER: "BeWARE.User",
    PolicyName.BEWARE_USER_ALS: "BeWARE.ALS.User",
    PolicyName.BEWARE_ITEM: "BeWARE.Item",
    PolicyName.BEWARE_ITEM_ALS: "BeWARE.ALS.Item",
    PolicyName.ORACLE: "Oracle",
    PolicyName.RANDOM: "Random",
}

_COMPACT = {
    PolicyName.GREEDY_ALS: "GreedyALS",
    PolicyName.GREEDY_ALS_WR: "GreedyALSWR",
    PolicyName.UCB_ALL_USERS: "UCBAllUsers",
    PolicyName.BEWARE_USER: "BeWAREUser",
    PolicyName.BEWARE_USER_ALS: "BeWAREUserALS",
    PolicyName.BEWARE_ITEM: "BeWAREItem",
    PolicyName.BEWARE_ITEM_ALS: "BeWAREItemALS",
    PolicyName.ORACLE: "Oracle",
    PolicyName.RANDOM: "Random",
}

# policy -> (regularization, last half-step)
_FACTOR_POLICIES = {
    PolicyName.GREEDY_ALS: (Regularization.STANDARD, HalfStep.USERS),
    PolicyName.GREEDY_ALS_WR: (Regularization.WEIGHTED, HalfStep.USERS),
    PolicyName.BEWARE_USER: (Regularization.WEIGHTED, HalfStep.USERS),
    PolicyName.BEWARE_USER_ALS: (Regularization.STANDARD, HalfStep.USERS),
    PolicyName.BEWARE_ITEM: (Regularization.WEIGHTED, HalfStep.ITEMS),
    PolicyName.BEWARE_ITEM_ALS: (Regularization.STANDARD, HalfStep.ITEMS),
}


class Recommender:
    """Base class: pick an item for a user, then learn from the revealed rating."""

    def __init__(self, policy: PolicyName):
        self.policy = policy

    @property
    def name(self) -> str:
        return self.policy.label

    def reset(self, matrix: RatingMatrix):
        """Start from whatever `matrix` already holds (possibly nothing)."""

    def select(self, user: int, allowed: Iterable[int], matrix: RatingMatrix) -> Selection:
        raise NotImplementedError

    def observe(self, obs: Observation, matrix: RatingMatrix):
        """`matrix` already contains `obs` when this is called."""


class FactorRecommender(Recommender):
    """Greedy or BeWARE selection on top of an ALS / ALS-WR factorization.

    The factorization is refreshed after every observation with a few
    warm-started sweeps; `full_refit_every` adds periodic cold refits.
    """

    def __init__(self, policy: PolicyName, fit: FitConfig, alpha: float,
                 refit_sweeps: int = 2, full_refit_every: Optional[int] = None):
        if policy not in _FACTOR_POLICIES:
            raise ConfigError(f"{policy.label} is not a factorization policy")
        super().__init__(policy)
        regularization, finish = _FACTOR_POLICIES[policy]
        self.fit = fit.with_updates(regularization=regularization)
        self.finish = finish
        self.alpha = alpha
        self.refit_sweeps = refit_sweeps
        self.full_refit_every = full_refit_every
        self.model: Optional[FactorModel] = None
        self._observed = 0

    def reset(self, matrix: RatingMatrix):
        self._observed = 0
        self.model = als_fit(matrix, self.fit, finish=self.finish)
        logger.debug(f"{self.name}: cold fit, objective={self.model.last_objective:.6g}")

    def select(self, user: int, allowed: Iterable[int], matrix: RatingMatrix) -> Selection:
        if self.model is None:
            self.reset(matrix)
        if self.policy in (PolicyName.GREEDY_ALS, PolicyName.GREEDY_ALS_WR):
            return greedy_select(self.model, user, allowed)
        selector = beware_item_select if self.finish == HalfStep.ITEMS else beware_user_select
        return selector(matrix, self.model, user, self.fit.lam, self.alpha, allowed,
                        regularization=self.fit.regularization)

    def observe(self, obs: Observation, matrix: RatingMatrix):
        self._observed += 1
        if self.full_refit_every and self._observed % self.full_refit_every == 0:
            self.model = als_fit(matrix, self.fit, finish=self.finish)
        else:
            self.model = als_fit(matrix, self.fit, warm_start=self.model, finish=self.finish,
                                 max_sweeps=self.refit_sweeps)


class UcbRecommender(Recommender):
    """UCB.on.all.users: one arm per item, rewards pooled over every user."""

    def __init__(self):
        super().__init__(PolicyName.UCB_ALL_USERS)
        self.stats = UcbArmStats()

    def reset(self, matrix: RatingMatrix):
        self.stats = UcbArmStats.empty(matrix.n_items)
        for obs in matrix.observations():
            update_ucb(self.stats, obs.item, obs.rating)

    def select(self, user: int, allowed: Iterable[int], matrix: RatingMatrix) -> Selection:
        return ucb1_select(self.stats, allowed)

    def observe(self, obs: Observation, matrix: RatingMatrix):
        update_ucb(self.stats, obs.item, obs.rating)


class OracleRecommender(Recommender):
    """Always picks the best true rating; must suffer zero regret."""

    def __init__(self, gt: GroundTruth):
        super().__init__(PolicyName.ORACLE)
        self.gt = gt

    def select(self, user: int, allowed: Iterable[int], matrix: RatingMatrix) -> Selection:
        return oracle_select(self.gt, user, allowed)


class RandomRecommender(Recommender):
    """Uniformly random allowed item."""

    def __init__(self, rng: np.random.Generator):
        super().__init__(PolicyName.RANDOM)
        self.rng = rng

    def select(self, user: int, allowed: Iterable[int], matrix: RatingMatrix) -> Selection:
        return random_select(self.rng, allowed)


def build_recommender(
    policy: PolicyName,
    fit: FitConfig,
    alpha: float,
    refit_sweeps: int,
    gt: GroundTruth,
    rng: np.random.Generator,
    full_refit_every: Optional[int] = None,
) -> Recommender:
    """Instantiate the recommender for `policy`."""
    if policy.uses_factorization:
        return FactorRecommender(policy, fit, alpha, refit_sweeps, full_refit_every)
    if policy == PolicyName.UCB_ALL_USERS:
        return UcbRecommender()
    if policy == PolicyName.ORACLE:
        return OracleRecommender(gt)
    return RandomRecommender(rng)
