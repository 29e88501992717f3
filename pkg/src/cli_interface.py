"""Command-line simulator: cumulative-regret curves for cold-start recommendation policies."""

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

import click
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from core.errors import BewareError, ConfigError, DataError
from core.settings import FitConfig
from datagen.block_model import BlockModelSpec, generate_block_model
from ingest.csv_loader import load_csv
from ingest.densify import densify
from policies.recommenders import PolicyName
from sim.episode import EpisodeConfig
from sim.experiment import DatasetSource, ExperimentResult, run_experiment, write_curves_csv
from utils.config import apply_preset, get, load_config
from utils.logger import get_logger, setup_logging

logger = get_logger(__name__)

console = Console()

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


@dataclass
class RunSetup:
    """Everything an experiment needs, resolved from flags, preset and config file."""
    config: dict[str, Any]
    source: DatasetSource
    template: EpisodeConfig
    runs: int
    seed: int
    jobs: int


def _model_options(func):
    """Flags shared by every command that builds a ground truth."""
    options = [
        click.option("--config", "config_path", type=click.Path(path_type=Path),
                     help="Path to a custom config file"),
        click.option("--preset", type=click.Choice(["artificial", "netflix", "yahoo"]),
                     help="Hyperparameters of one of the standard experiment setups"),
        click.option("--debug", is_flag=True, help="Enable debug logging (per-step selections)"),
        click.option("--dataset", default="synthetic", show_default=True,
                     help="'synthetic' or 'csv:PATH' (user,item,rating log)"),
        click.option("--users", type=int, help="Synthetic users"),
        click.option("--items", type=int, help="Synthetic items"),
        click.option("--genres", type=int, help="Synthetic item genres"),
        click.option("--types", type=int, help="Synthetic user types"),
        click.option("--noise-sigma", type=float, help="Std of the Gaussian rating noise"),
        click.option("--top-users", type=int, help="Users kept when densifying a CSV dataset"),
        click.option("--top-items", type=int, help="Items kept when densifying a CSV dataset"),
        click.option("--seed", type=int, help="Seed of the first run"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _episode_options(func):
    """Flags shared by the simulation commands."""
    options = [
        click.option("--k", "rank", type=int, help="Latent dimension"),
        click.option("--lambda", "lam", type=float, help="Regularization weight"),
        click.option("--alpha", type=float, help="Exploration weight"),
        click.option("--runs", type=int, help="Episodes per policy"),
        click.option("--refit-sweeps", type=int, help="Warm ALS sweeps after each observation"),
        click.option("--warmup-fraction", type=float, help="Share of known ratings revealed up front"),
        click.option("--full-refit-every", type=int, help="Cold refit period in steps"),
        click.option("--jobs", type=int, help="Worker processes"),
        click.option("--out", type=click.Path(path_type=Path), help="CSV file for the regret curves"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _load(config_path: Optional[Path], preset: Optional[str], debug: bool) -> dict[str, Any]:
    config = apply_preset(load_config(config_path), preset)
    level = "DEBUG" if debug else get("logging.level", "INFO", config)
    setup_logging(level=level, log_file=get("logging.file", None, config))
    if config_path:
        logger.info(f"Loaded custom config from: {config_path}")
    if preset:
        logger.info(f"Using preset: {preset}")
    return config


def _flag_or_config(opts: dict[str, Any], name: str, path: str, default: Any, config: dict[str, Any]) -> Any:
    """Command-line value when given (0 included), else the config value."""
    value = opts.get(name)
    return value if value is not None else get(path, default, config)


def _synthetic_spec(config: dict[str, Any], opts: dict[str, Any], seed: int) -> BlockModelSpec:
    return BlockModelSpec.from_config(
        config,
        n_users=opts.get("users"),
        n_items=opts.get("items"),
        genres=opts.get("genres"),
        types=opts.get("types"),
        noise_sigma=opts.get("noise_sigma"),
        seed=seed,
    )


def _dataset_source(config: dict[str, Any], opts: dict[str, Any], seed: int) -> DatasetSource:
    dataset = opts["dataset"]
    if dataset == "synthetic":
        return DatasetSource(synthetic=_synthetic_spec(config, opts, seed))
    if dataset.startswith("csv:"):
        path = dataset[len("csv:"):]
        if not path:
            raise click.BadParameter("missing path after 'csv:'", param_hint="--dataset")
        gt = densify(
            load_csv(path),
            top_users=_flag_or_config(opts, "top_users", "ingest.top_users", 5000, config),
            top_items=_flag_or_config(opts, "top_items", "ingest.top_items", 250, config),
            noise_sigma=_flag_or_config(opts, "noise_sigma", "ingest.noise_sigma", 0.0, config),
        )
        return DatasetSource(ground_truth=gt)
    raise click.BadParameter(f"expected 'synthetic' or 'csv:PATH', got {dataset!r}", param_hint="--dataset")


def _setup(opts: dict[str, Any]) -> RunSetup:
    config = _load(opts["config_path"], opts["preset"], opts["debug"])
    seed = _flag_or_config(opts, "seed", "experiment.seed", 0, config)
    runs = _flag_or_config(opts, "runs", "experiment.runs", 20, config)
    jobs = _flag_or_config(opts, "jobs", "experiment.jobs", 1, config)

    fit = FitConfig.from_config(config, rank=opts["rank"], lam=opts["lam"])
    template = EpisodeConfig.from_config(
        config,
        policy=PolicyName.GREEDY_ALS,
        fit=fit,
        alpha=opts["alpha"],
        refit_sweeps=opts["refit_sweeps"],
        warmup_fraction=opts["warmup_fraction"],
        full_refit_every=opts["full_refit_every"],
    )
    source = _dataset_source(config, opts, seed)
    return RunSetup(config=config, source=source, template=template, runs=runs, seed=seed, jobs=jobs)


def _summary_table(result: ExperimentResult, setup: RunSetup) -> Table:
    fit = setup.template.fit
    table = Table(
        title=f"Cumulative regret after {len(next(iter(result.curves.values())))} steps "
              f"({result.runs} runs, k={fit.rank}, lambda={fit.lam:g}, alpha={setup.template.alpha:g})",
        title_style="bold cyan",
    )
    table.add_column("Policy", style="bold")
    table.add_column("Mean cum. regret", justify="right")
    table.add_column("Std. error", justify="right")
    best = result.ranking()[0].policy
    for curve in result.ranking():
        style = "green" if curve.policy == best else None
        table.add_row(curve.policy, f"{curve.final_regret:.2f}", f"{curve.final_stderr:.2f}", style=style)
    return table


def _run(names: Optional[Sequence[str]], opts: dict[str, Any]):
    setup = _setup(opts)
    names = names or get("experiment.policies", [], setup.config)
    if not names:
        raise click.BadParameter("no policies given", param_hint="--policies")
    policies = [PolicyName.parse(name) for name in names]
    console.print(f"[cyan]{setup.source.description}[/cyan]")

    with Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task("Simulating", total=len(policies) * setup.runs)

        def on_progress(current: int, total: int, label: str):
            progress.update(task, completed=current, description=label)

        result = run_experiment(
            setup.source,
            policies,
            setup.template,
            runs=setup.runs,
            seed=setup.seed,
            jobs=setup.jobs,
            progress_callback=on_progress,
        )

    console.print(_summary_table(result, setup))
    if opts["out"]:
        path = write_curves_csv(opts["out"], result)
        console.print(f"[green]✓ Regret curves written to {path}[/green]")


@click.group()
def cli():
    """Simulate cold-start recommendation with bandit-driven matrix factorization.

    Every command starts from an empty rating matrix, recommends one item per
    step to a random user and reports the cumulative regret against the
    ground truth.

    Examples:
      beware-sim simulate --policy beware-item --runs 5 --out item.csv
      beware-sim compare --policies greedy-als,ucb-all-users,beware-item --out fig.csv
      beware-sim compare --dataset csv:ratings.csv --preset netflix --out netflix.csv
    """


@cli.command()
@click.option("--policy", required=True, help="Policy name, e.g. beware-item or BeWARE.Item")
@_model_options
@_episode_options
def simulate(policy: str, **opts: Any):
    """Run one policy and write its mean cumulative-regret curve."""
    _run([policy], opts)


@cli.command()
@click.option("--policies", help="Comma-separated policy names (default: experiment.policies)")
@_model_options
@_episode_options
def compare(policies: Optional[str], **opts: Any):
    """Run several policies on shared seeds and write all their curves."""
    names = [p.strip() for p in policies.split(",") if p.strip()] if policies else None
    _run(names, opts)


@cli.command()
@_model_options
@click.option("--out", type=click.Path(path_type=Path), required=True, help="CSV file for the ground truth")
def generate(out: Path, **opts: Any):
    """Write a synthetic block-model ground truth as a user,item,rating CSV."""
    config = _load(opts["config_path"], opts["preset"], opts["debug"])
    seed = _flag_or_config(opts, "seed", "experiment.seed", 0, config)
    model = generate_block_model(_synthetic_spec(config, opts, seed))
    path = model.ground_truth.to_csv(out)
    console.print(f"[green]✓ {model.ground_truth.n_users}x{model.ground_truth.n_items} ground truth "
                  f"written to {path}[/green]")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns 0 on success, 1 on usage/config errors, 2 on data errors."""
    try:
        code = cli.main(args=list(argv) if argv is not None else None, prog_name="beware-sim",
                        standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        console.print("[cyan]Aborted.[/cyan]")
        return EXIT_USAGE
    except ConfigError as e:
        console.print(f"[red]Configuration error: {e}[/red]")
        return EXIT_USAGE
    except DataError as e:
        console.print(f"[red]Data error: {e}[/red]")
        return EXIT_DATA
    except BewareError as e:
        logger.error(f"Simulation failed: {e}", exc_info=True)
        console.print(f"[red]Error: {e}[/red]")
        return EXIT_DATA
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
