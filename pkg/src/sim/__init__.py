"""Online simulation harness: episodes, regret traces and multi-run experiments."""

from .aggregate import RegretCurve, aggregate
from .episode import EpisodeConfig, RegretTrace, TraceStep, immediate_regret, run_episode
from .experiment import DatasetSource, ExperimentResult, run_experiment, write_curves_csv

__all__ = [
    "DatasetSource",
    "EpisodeConfig",
    "ExperimentResult",
    "RegretCurve",
    "RegretTrace",
    "TraceStep",
    "aggregate",
    "immediate_regret",
    "run_episode",
    "run_experiment",
    "write_curves_csv",
]
