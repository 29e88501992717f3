"""Synthetic block-model generator from the offline evaluation protocol."""

from .block_model import (
    BlockModel,
    BlockModelSpec,
    generate_block_model,
    generate_ground_truth,
    observe_noisy,
)

__all__ = [
    "BlockModel",
    "BlockModelSpec",
    "generate_block_model",
    "generate_ground_truth",
    "observe_noisy",
]
