"""Item-selection strategies: greedy, UCB1, BeWARE.User, BeWARE.Item and references."""

from .baselines import oracle_select, random_select
from .beware import beware_item_select, beware_user_select, item_design_stack
from .greedy import estimated_ratings, greedy_select
from .recommenders import (
    FactorRecommender,
    OracleRecommender,
    PolicyName,
    RandomRecommender,
    Recommender,
    UcbRecommender,
    build_recommender,
)
from .selection import Selection
from .ucb import UcbArmStats, ucb1_select, update_ucb

__all__ = [
    "FactorRecommender",
    "OracleRecommender",
    "PolicyName",
    "RandomRecommender",
    "Recommender",
    "Selection",
    "UcbArmStats",
    "UcbRecommender",
    "beware_item_select",
    "beware_user_select",
    "build_recommender",
    "estimated_ratings",
    "greedy_select",
    "item_design_stack",
    "oracle_select",
    "random_select",
    "ucb1_select",
    "update_ucb",
]
