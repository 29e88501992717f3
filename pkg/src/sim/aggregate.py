"""Average cumulative-regret curves over independent runs."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from core.errors import LengthMismatch
from sim.episode import RegretTrace


@dataclass(frozen=True, eq=False)
class RegretCurve:
    """Mean cumulative regret per step and its standard error over `runs` traces."""
    policy: str
    mean: np.ndarray
    stderr: np.ndarray
    runs: int

    def __len__(self) -> int:
        return len(self.mean)

    @property
    def final_regret(self) -> float:
        return float(self.mean[-1]) if len(self.mean) else 0.0

    @property
    def final_stderr(self) -> float:
        return float(self.stderr[-1]) if len(self.stderr) else 0.0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "policy": self.policy,
            "step": np.arange(1, len(self.mean) + 1),
            "mean_cum_regret": self.mean,
            "stderr": self.stderr,
        })


def aggregate(traces: Sequence[RegretTrace]) -> RegretCurve:
    """Pointwise mean and standard error (sample std / sqrt(runs)) of cumulative regret.

    A single trace gets a zero standard error.

    Raises:
        LengthMismatch: If there are no traces or their lengths differ.
    """
    if not traces:
        raise LengthMismatch("No traces to aggregate")
    lengths = {len(t) for t in traces}
    if len(lengths) != 1:
        raise LengthMismatch(f"Traces have different lengths: {sorted(lengths)}")

    curves = np.vstack([t.cumulative for t in traces])
    runs = curves.shape[0]
    mean = curves.mean(axis=0)
    if runs > 1:
        stderr = curves.std(axis=0, ddof=1) / np.sqrt(runs)
    else:
        stderr = np.zeros_like(mean)
    return RegretCurve(policy=traces[0].policy, mean=mean, stderr=stderr, runs=runs)
