"""Validated configuration models.

Models are immutable pydantic objects; invalid values raise ConfigError.
"""

from enum import Enum
from typing import Any, Mapping

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core.errors import ConfigError


class Regularization(str, Enum):
    """Shape of the penalty Omega(U, V)."""
    STANDARD = "standard"   # ||U||^2 + ||V||^2
    WEIGHTED = "weighted"   # ALS-WR: rows scaled by their rating counts


class HalfStep(str, Enum):
    """Which factor an ALS half-step re-solves."""
    USERS = "users"
    ITEMS = "items"


class Settings(BaseModel):
    """Base for frozen configuration models that fail with ConfigError."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    def __init__(self, **data: Any):
        try:
            super().__init__(**data)
        except ValidationError as e:
            raise ConfigError(f"Invalid {type(self).__name__}: {e}") from e

    def with_updates(self, **changes: Any):
        """Validated copy with some fields replaced."""
        return type(self)(**{**self.model_dump(), **changes})


class FitConfig(Settings):
    """Hyperparameters of an ALS / ALS-WR factorization."""

    rank: int = Field(5, ge=1, description="Latent dimension k")
    lam: float = Field(0.05, ge=0, alias="lambda", description="Regularization weight")
    regularization: Regularization = Regularization.WEIGHTED
    max_sweeps: int = Field(20, ge=1)
    objective_tolerance: float = Field(1e-6, ge=0)
    seed: int = 0
    init_scale: float = Field(0.01, ge=0, description="Half-width of the uniform initial item factors")

    @classmethod
    def from_config(cls, config: Mapping[str, Any], **overrides: Any) -> "FitConfig":
        """Build from the `fit` section of a loaded config, with non-None overrides."""
        section = dict(config.get("fit", {}) or {})
        if "lambda" in section:
            section["lam"] = section.pop("lambda")
        section.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**section)
