"""Repeat episodes over several runs and policies, then aggregate the regret curves."""

import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import pandas as pd

from core.errors import ConfigError, IoError
from core.ground_truth import GroundTruth
from datagen.block_model import BlockModelSpec, generate_ground_truth
from policies.recommenders import PolicyName
from sim.aggregate import RegretCurve, aggregate
from sim.episode import EpisodeConfig, RegretTrace, run_episode
from utils.logger import get_logger

logger = get_logger(__name__)

CURVE_COLUMNS = ["policy", "step", "mean_cum_regret", "stderr"]


@dataclass(frozen=True, eq=False)
class DatasetSource:
    """Either a synthetic generator (fresh ground truth per run) or a fixed ground truth."""
    synthetic: Optional[BlockModelSpec] = None
    ground_truth: Optional[GroundTruth] = None

    def __post_init__(self):
        if (self.synthetic is None) == (self.ground_truth is None):
            raise ConfigError("DatasetSource needs exactly one of synthetic or ground_truth")

    @property
    def description(self) -> str:
        if self.synthetic is not None:
            s = self.synthetic
            return f"synthetic {s.n_users}x{s.n_items} ({s.genres} genres, {s.types} types)"
        gt = self.ground_truth
        return f"dataset {gt.n_users}x{gt.n_items} (fill rate {gt.fill_rate:.1%})"

    def for_run(self, seed: int) -> GroundTruth:
        if self.synthetic is not None:
            return generate_ground_truth(self.synthetic.with_updates(seed=seed))
        return self.ground_truth


@dataclass
class ExperimentResult:
    """Traces and aggregated curves of one experiment."""
    curves: dict[str, RegretCurve] = field(default_factory=dict)
    traces: dict[str, list[RegretTrace]] = field(default_factory=dict)
    runs: int = 0
    processing_time_ms: float = 0.0

    def to_frame(self) -> pd.DataFrame:
        if not self.curves:
            return pd.DataFrame(columns=CURVE_COLUMNS)
        return pd.concat([c.to_frame() for c in self.curves.values()], ignore_index=True)

    def ranking(self) -> list[RegretCurve]:
        """Curves ordered by final mean cumulative regret, best first."""
        return sorted(self.curves.values(), key=lambda c: c.final_regret)

    def get_summary_report(self) -> str:
        lines = [
            "Experiment Summary",
            "=" * 50,
            f"Runs per policy: {self.runs}",
            f"Processing time: {self.processing_time_ms / 1000:.1f}s",
            "",
            "Final cumulative regret (mean +- stderr):",
        ]
        for curve in self.ranking():
            lines.append(f"  {curve.policy:<20} {curve.final_regret:10.2f} +- {curve.final_stderr:.2f}")
        return "\n".join(lines)


def _run_one(gt: GroundTruth, cfg: EpisodeConfig) -> RegretTrace:
    return run_episode(gt, cfg)


def run_experiment(
    source: DatasetSource,
    policies: Sequence[PolicyName],
    template: EpisodeConfig,
    runs: int,
    seed: int = 0,
    jobs: int = 1,
    progress_callback: Optional[Callable[[int, int, str], None]] = None,
) -> ExperimentResult:
    """Run every policy `runs` times and aggregate cumulative regret.

    Run r uses seed `seed + r` for both the synthetic ground truth and the
    episode, so all policies face the same problems and user sequences.

    Args:
        source: Where each run's ground truth comes from.
        policies: Policies to compare; duplicates are ignored.
        template: Episode settings shared by all policies (its policy and seed are replaced).
        runs: Episodes per policy.
        seed: Seed of the first run.
        jobs: Worker processes; 1 runs everything in-process.
        progress_callback: Optional callback(current, total, label) after each episode.

    Returns:
        ExperimentResult with per-policy traces (ordered by run) and curves.

    Raises:
        ConfigError: If runs or jobs is below 1, or no policy is given.
    """
    if runs < 1:
        raise ConfigError(f"runs must be >= 1, got {runs}")
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    policies = list(dict.fromkeys(policies))
    if not policies:
        raise ConfigError("No policies to run")

    start_time = time.perf_counter()
    problems = [source.for_run(seed + r) for r in range(runs)]
    tasks = [
        (policy, r, template.with_updates(policy=policy, seed=seed + r))
        for policy in policies
        for r in range(runs)
    ]
    total = len(tasks)
    logger.info(f"Running {len(policies)} policies x {runs} runs on {source.description} (jobs={jobs})")

    results: dict[tuple[PolicyName, int], RegretTrace] = {}

    def _record(done: int, policy: PolicyName, r: int, trace: RegretTrace):
        results[(policy, r)] = trace
        logger.debug(f"[{done}/{total}] {policy.label} run {r}: cumulative regret {trace.final_regret:.2f}")
        if progress_callback:
            progress_callback(done, total, f"{policy.label} run {r + 1}/{runs}")

    if jobs == 1:
        for done, (policy, r, cfg) in enumerate(tasks, 1):
            _record(done, policy, r, run_episode(problems[r], cfg))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_run_one, problems[r], cfg): (policy, r) for policy, r, cfg in tasks}
            for done, future in enumerate(as_completed(futures), 1):
                policy, r = futures[future]
                _record(done, policy, r, future.result())

    result = ExperimentResult(runs=runs)
    for policy in policies:
        traces = [results[(policy, r)] for r in range(runs)]
        result.traces[policy.label] = traces
        result.curves[policy.label] = aggregate(traces)
    result.processing_time_ms = (time.perf_counter() - start_time) * 1000

    logger.info(f"Experiment complete\n{result.get_summary_report()}")
    return result


def write_curves_csv(path: str | Path, curves: Sequence[RegretCurve] | ExperimentResult) -> Path:
    """Write policy,step,mean_cum_regret,stderr rows, one per policy and step.

    Raises:
        IoError: If the file can't be written.
    """
    path = Path(path).expanduser()
    if isinstance(curves, ExperimentResult):
        frame = curves.to_frame()
    elif curves:
        frame = pd.concat([c.to_frame() for c in curves], ignore_index=True)
    else:
        frame = pd.DataFrame(columns=CURVE_COLUMNS)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame[CURVE_COLUMNS].to_csv(path, index=False)
    except OSError as e:
        raise IoError(f"Failed to write curves to {path}: {e}") from e
    logger.info(f"Wrote {len(frame)} curve rows to {path}")
    return path
