import copy
import os
import yaml
from pathlib import Path
from typing import Any, Dict, Mapping

from core.errors import ConfigError

# Try config.yaml first, fall back to default_config.yaml
CONFIG_DIR = Path(__file__).resolve().parents[2] / "config"
DEFAULT_CONFIG_PATH = CONFIG_DIR / "config.yaml"
if not DEFAULT_CONFIG_PATH.exists():
    DEFAULT_CONFIG_PATH = CONFIG_DIR / "default_config.yaml"

ENV_PREFIX = "BEWARE__"


def load_config(path: str | Path | None = None) -> Dict[str, Any]:
    """Load configuration from YAML and apply environment variable overrides.

    Args:
        path: Optional path to a YAML config file. If not provided, uses the
            repository's `config/config.yaml` or `config/default_config.yaml`.

    Returns:
        A dictionary with configuration values.

    Raises:
        ConfigError: If an explicit path doesn't exist or the YAML is malformed.
    """
    cfg_path = Path(path) if path else DEFAULT_CONFIG_PATH
    config: Dict[str, Any] = {}

    if path and not cfg_path.exists():
        raise ConfigError(f"Config file not found: {cfg_path}")

    if cfg_path.exists():
        try:
            with open(cfg_path, "r", encoding="utf-8") as fh:
                config = yaml.safe_load(fh) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Malformed config file {cfg_path}: {e}") from e

    # BEWARE__FIT__RANK=8 -> config["fit"]["rank"] = 8
    for env_key, raw in os.environ.items():
        if not env_key.startswith(ENV_PREFIX):
            continue
        parts = [p.lower() for p in env_key[len(ENV_PREFIX):].split("__") if p]
        if not parts:
            continue
        cur = config
        for p in parts[:-1]:
            if not isinstance(cur.get(p), dict):
                cur[p] = {}
            cur = cur[p]
        cur[parts[-1]] = yaml.safe_load(raw)

    return config


def get(path: str, default: Any = None, config: Mapping[str, Any] | None = None) -> Any:
    """Helper to get nested config values using dot-separated path.

    Example: get('fit.lambda')
    """
    parts = path.split(".") if path else []
    cur = config if config is not None else load_config()
    for p in parts:
        if isinstance(cur, Mapping) and p in cur:
            cur = cur[p]
        else:
            return default
    return cur


def merge(base: Mapping[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Recursively merge `overrides` into a copy of `base`."""
    merged = copy.deepcopy(dict(base))
    for key, value in overrides.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def get_preset(name: str, config: Mapping[str, Any] | None = None) -> Dict[str, Any]:
    """Return the overrides of a named experiment preset.

    Raises:
        ConfigError: If no preset with that name is configured.
    """
    presets = get("presets", {}, config) or {}
    if name not in presets:
        raise ConfigError(
            f"Unknown preset '{name}'. Available presets: {', '.join(sorted(presets)) or 'none'}"
        )
    return dict(presets[name])


def apply_preset(config: Mapping[str, Any], name: str | None) -> Dict[str, Any]:
    """Return `config` with the named preset merged over it (no-op for None)."""
    if not name:
        return dict(config)
    return merge(config, get_preset(name, config))
