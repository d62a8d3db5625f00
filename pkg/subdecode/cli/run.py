"""The ``run`` command: simulate schemes and write averaged traces."""

import logging
from pathlib import Path

import click

from subdecode.core.config import ExperimentConfig
from subdecode.core.exceptions import SubdecodeError
from subdecode.core.interfaces import MetricsTrace, ProblemKind, Scheme
from subdecode.problems.generators import planted_block_members
from subdecode.problems.spectral import cluster_labels, clustering_accuracy
from subdecode.simharness.runner import (
    ProblemInstance,
    average_traces,
    build_problem,
    run_experiment,
    simulate_run,
)
from subdecode.simharness.seeding import Stream, run_stream
from subdecode.verify.checks import spoke_scatter

from .exceptions import ConfigError
from .utils import (
    ensure_directory,
    format_table,
    info,
    load_config_manager,
    print_section,
    success,
    write_csv,
)

logger = logging.getLogger(__name__)

TRACE_HEADER = ["iteration", "comm_cost", "error_mean", "error_std", "delta_mean"]
SPOKES_HEADER = ["node", "v3", "v5", "block"]


def trace_rows(trace: MetricsTrace) -> list[list[str]]:
    """CSV rows of an averaged trace, floats in shortest round-trip form."""
    return [
        [
            str(record.iteration),
            repr(float(record.comm_cost)),
            repr(float(record.error)),
            repr(float(record.error_std)),
            repr(float(record.delta)),
        ]
        for record in trace.records
    ]


def _readout_config(configs: list[ExperimentConfig]) -> ExperimentConfig:
    """The coded scheme's config when there is one, else the first."""
    for cfg in configs:
        if cfg.scheme.scheme is Scheme.CODED:
            return cfg
    return configs[0]


def write_readouts(
    configs: list[ExperimentConfig], instance: ProblemInstance, out_dir: Path
) -> None:
    """Eigenspokes scatter for planted SVD problems, cluster accuracy for labeled SBM graphs."""
    if instance.kind is ProblemKind.SVD and instance.planted is not None:
        if instance.rank < 5:
            logger.info("eigenspokes readout skipped: rank below 5")
            return
        cfg = _readout_config(configs)
        _, state = simulate_run(cfg, instance, 0)
        scatter = spoke_scatter(
            state.X[: instance.problem.n], planted_block_members(instance.planted)
        )
        rows = [
            [str(int(node)), repr(float(v3)), repr(float(v5)), str(int(block))]
            for node, v3, v5, block in scatter
        ]
        path = write_csv(out_dir / "eigenspokes.csv", SPOKES_HEADER, rows)
        info(f"Eigenspokes scatter ({cfg.scheme}) written to {path}")

    if instance.kind is ProblemKind.EIGEN and instance.labels is not None:
        if instance.rank < 2:
            return
        cfg = _readout_config(configs)
        _, state = simulate_run(cfg, instance, 0)
        labels = cluster_labels(state.X[: instance.problem.n])
        accuracy = clustering_accuracy(labels, instance.labels)
        info(f"Clustering accuracy ({cfg.scheme}, run 0): {accuracy:.4f}")


@click.command()
@click.option("--config", "config_path", type=click.Path(), help="Flat key = value config file")
@click.option("--preset", help="Name of a preset shipped in presets/")
@click.option("--seed", type=int, help="Master seed")
@click.option("--out", "out_dir", default="results", show_default=True, help="Output directory")
@click.option("--scheme", "schemes", multiple=True, help="Scheme label, e.g. coded-d3 (repeatable)")
@click.option("--runs", type=int, help="Independent runs per scheme")
@click.option("--iters", type=int, help="Iterations per run")
@click.option("--jobs", type=int, help="Worker threads for independent runs")
def run(
    config_path: str | None,
    preset: str | None,
    seed: int | None,
    out_dir: str,
    schemes: tuple[str, ...],
    runs: int | None,
    iters: int | None,
    jobs: int | None,
):
    """Run an experiment and write one CSV trace per scheme."""
    overrides = {
        "seed": seed,
        "runs": runs,
        "iterations": iters,
        "jobs": jobs,
        "schemes": list(schemes) or None,
    }
    manager = load_config_manager(config_path, preset, overrides)
    try:
        configs = manager.get_experiment_configs()
    except SubdecodeError as e:
        raise ConfigError.from_library(e, config_path) from e

    directory = ensure_directory(out_dir)
    first = configs[0]
    try:
        instance = build_problem(first.problem, run_stream(first.seed, 0, Stream.PROBLEM))
        summary = []
        for cfg in configs:
            trace = average_traces(run_experiment(cfg, instance))
            path = write_csv(directory / f"{cfg.scheme}.csv", TRACE_HEADER, trace_rows(trace))
            per_iter = trace.records[1].comm_cost if len(trace) > 1 else 0.0
            summary.append(
                [
                    str(cfg.scheme),
                    f"{trace.final.error:.4e}",
                    f"{trace.final.error_std:.2e}",
                    f"{trace.final.delta:.4f}",
                    f"{per_iter:.6g}",
                    str(path.name),
                ]
            )
            logger.info(f"wrote {path}")
        write_readouts(configs, instance, directory)
    except SubdecodeError as e:
        raise ConfigError.from_library(e, config_path) from e

    print_section(
        f"{first.problem.problem.value} / {first.split.value} split: "
        f"{first.runs} runs x {first.iterations} iterations",
        format_table(
            ["scheme", "final error", "std", "delta", "cost/iter", "file"], summary
        ),
    )
    success(f"Traces written to {directory}")
