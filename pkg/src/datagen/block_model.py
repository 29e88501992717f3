"""Synthetic block-model ground truth and the noisy observation channel.

Each item belongs to one of `genres`, each user to one of `types`; the true
rating of user i for item j is p[genre(j), type(i)] with every table entry
drawn uniformly from `rating_levels`. Revealed ratings add Gaussian noise.
"""

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
from pydantic import Field, field_validator

from core.errors import Unavailable
from core.ground_truth import GroundTruth
from core.settings import Settings
from utils.logger import get_logger

logger = get_logger(__name__)


class BlockModelSpec(Settings):
    """Shape, block counts and noise of a synthetic ratings problem."""

    n_users: int = Field(200, ge=1)
    n_items: int = Field(100, ge=1)
    genres: int = Field(5, ge=1, description="Item genres (k)")
    types: int = Field(5, ge=1, description="User types (l)")
    rating_levels: tuple[int, ...] = (1, 2, 3, 4, 5)
    noise_sigma: float = Field(0.5, ge=0)
    # When true, noise_sigma is read as a variance rather than a standard deviation
    noise_is_variance: bool = False
    seed: int = 0

    @field_validator("rating_levels")
    @classmethod
    def _levels_not_empty(cls, levels: tuple[int, ...]) -> tuple[int, ...]:
        if not levels:
            raise ValueError("rating_levels must not be empty")
        return levels

    @property
    def noise_std(self) -> float:
        return float(np.sqrt(self.noise_sigma)) if self.noise_is_variance else self.noise_sigma

    @classmethod
    def from_config(cls, config: Mapping[str, Any], **overrides: Any) -> "BlockModelSpec":
        """Build from the `synthetic` section of a loaded config, with non-None overrides."""
        section = dict(config.get("synthetic", {}) or {})
        renames = {"users": "n_users", "items": "n_items"}
        values = {renames.get(k, k): v for k, v in section.items()}
        if "rating_levels" in values:
            values["rating_levels"] = tuple(values["rating_levels"])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class BlockModel:
    """Generated ground truth plus the latent block structure behind it."""
    item_genres: np.ndarray
    user_types: np.ndarray
    table: np.ndarray
    ground_truth: GroundTruth


def generate_block_model(spec: BlockModelSpec) -> BlockModel:
    """Draw genre/type assignments, then the p table, then assemble R*."""
    rng = np.random.default_rng(spec.seed)
    item_genres = rng.integers(spec.genres, size=spec.n_items)
    user_types = rng.integers(spec.types, size=spec.n_users)
    table = rng.choice(np.asarray(spec.rating_levels, dtype=np.float64), size=(spec.genres, spec.types))

    values = table[item_genres[None, :], user_types[:, None]]
    gt = GroundTruth.full(values, noise_sigma=spec.noise_std)

    logger.info(
        f"Generated block model: {spec.n_users} users x {spec.n_items} items, "
        f"{spec.genres} genres, {spec.types} types, noise std {spec.noise_std:g}"
    )
    return BlockModel(item_genres=item_genres, user_types=user_types, table=table, ground_truth=gt)


def generate_ground_truth(spec: BlockModelSpec) -> GroundTruth:
    """R* of the block model described by `spec` (fully available)."""
    return generate_block_model(spec).ground_truth


def observe_noisy(gt: GroundTruth, i: int, j: int, rng: np.random.Generator) -> float:
    """r*_{i,j} plus N(0, gt.noise_sigma^2) noise; never clipped.

    Raises:
        Unavailable: If the cell is masked out.
    """
    if not gt.is_available(i, j):
        raise Unavailable(f"Ground truth for user {i}, item {j} is not available")
    truth = float(gt.values[i, j])
    if gt.noise_sigma == 0:
        return truth
    return truth + float(rng.normal(0.0, gt.noise_sigma))
