"""Run experiments: problem construction, the master loop and trace averaging."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from subdecode.core.config import ExperimentConfig, ProblemSpec
from subdecode.core.exceptions import DimensionError
from subdecode.core.interfaces import (
    MetricsRecord,
    MetricsTrace,
    ProblemKind,
    Scheme,
    SplitScheme,
)
from subdecode.engines import build_engine, scheme_pattern
from subdecode.engines.base import IterationEngine
from subdecode.problems.edgelist import load_edge_list, load_triplets
from subdecode.problems.generators import (
    PlantedMatrix,
    gen_er,
    gen_planted_with_members,
    gen_sbm,
)
from subdecode.problems.least_squares import build_least_squares
from subdecode.problems.pagerank import DanglingMode, build_pagerank
from subdecode.problems.spectral import (
    IsolateMode,
    build_shifted_laplacian,
    build_svd_problem,
)
from subdecode.simharness.costs import comm_cost_per_iter
from subdecode.simharness.erasure import draw_survivors
from subdecode.simharness.seeding import Stream, run_stream, stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """A built problem plus the generator side information some readouts need."""

    kind: ProblemKind
    problem: Any
    labels: np.ndarray | None = None
    planted: PlantedMatrix | None = None

    @property
    def dimension(self) -> int:
        """Length of the vectors exchanged per iteration (N, or dim for GD)."""
        if self.kind is ProblemKind.GD:
            return int(self.problem.dim)
        return int(self.problem.n)

    @property
    def rank(self) -> int:
        return int(getattr(self.problem, "r", 1))


def build_problem(spec: ProblemSpec, rng: np.random.Generator) -> ProblemInstance:
    """
    Construct the problem an experiment iterates on.

    Args:
        spec: Problem description
        rng: Problem stream

    Returns:
        ProblemInstance
    """
    kind = spec.problem
    if kind is ProblemKind.PAGERANK:
        if spec.graph == "edgelist":
            adjacency = load_edge_list(spec.edge_list or "")
        else:
            adjacency = gen_er(spec.n_nodes, spec.edge_probability(), rng)
        problem = build_pagerank(
            adjacency, spec.damping, dangling_mode=DanglingMode(spec.dangling)
        )
        return ProblemInstance(kind, problem)

    if kind is ProblemKind.EIGEN:
        labels = None
        if spec.graph == "sbm":
            adjacency, labels = gen_sbm(spec.n_nodes, spec.p_in, spec.p_out, rng)
        elif spec.graph == "edgelist":
            adjacency = load_edge_list(spec.edge_list or "", directed=False)
        else:
            adjacency = gen_er(spec.n_nodes, spec.edge_probability(), rng)
        problem = build_shifted_laplacian(adjacency, spec.rank, IsolateMode(spec.isolates))
        if labels is not None and problem.kept_nodes is not None:
            labels = labels[problem.kept_nodes]
        return ProblemInstance(kind, problem, labels=labels)

    if kind is ProblemKind.SVD:
        planted = None
        if spec.graph == "triplets":
            data = load_triplets(spec.matrix_file or "")
        else:
            blocks = [(spec.block_size, spec.block_prob)] * spec.planted_blocks
            planted = gen_planted_with_members(spec.n_nodes, spec.background_prob, blocks, rng)
            data = planted.matrix
        return ProblemInstance(kind, build_svd_problem(data, spec.rank), planted=planted)

    return ProblemInstance(kind, build_least_squares(spec.n_rows, spec.dim, rng))


def make_engine(
    cfg: ExperimentConfig, instance: ProblemInstance, run: int
) -> IterationEngine:
    """Engine for one run, with the run's own placement pattern."""
    scheme = cfg.scheme.scheme
    params = cfg.group_params if cfg.split is SplitScheme.SUMMA else cfg.params
    pattern = scheme_pattern(
        scheme,
        params,
        run_stream(cfg.seed, run, Stream.PATTERN),
        cfg.pattern_kind,
        cfg.pattern_file,
    )
    return build_engine(
        instance.kind,
        cfg.split,
        instance.problem,
        scheme,
        pattern,
        k=cfg.code.k,
        accelerate=cfg.accelerate,
        step_size=cfg.problem.step_size,
        normalize_step=cfg.problem.normalize_step,
        rank_tol=cfg.rank_tol,
        shared=cfg.shared,
    )


def run_once(cfg: ExperimentConfig, instance: ProblemInstance, run: int) -> MetricsTrace:
    """Simulate one run and return its trace."""
    return simulate_run(cfg, instance, run)[0]


def simulate_run(
    cfg: ExperimentConfig, instance: ProblemInstance, run: int
) -> tuple[MetricsTrace, Any]:
    """
    Simulate one run of ``cfg.iterations`` master iterations.

    The initial point is drawn from a run-independent stream, so runs differ
    only in their patterns, codes and erasures. The erasure stream does not
    depend on the scheme.

    Returns:
        The run's trace and the final master state
    """
    scheme = cfg.scheme.scheme
    engine = make_engine(cfg, instance, run)
    state = engine.initial_state(run_stream(cfg.seed, 0, Stream.INIT))
    params = cfg.params
    per_iter = comm_cost_per_iter(
        scheme,
        instance.kind,
        cfg.split,
        instance.dimension,
        params.k,
        params.P,
        params.d,
        instance.rank,
    )

    P = engine.n_workers
    everyone = np.arange(P)
    records = [MetricsRecord(0, engine.error(state), 0.0, float(P), 0.0)]
    for t in range(cfg.iterations):
        if scheme is Scheme.NOISELESS:
            survivors = everyone
        else:
            survivors = draw_survivors(P, cfg.erasure, stream(cfg.seed, run, t, Stream.ERASURE))
        state = engine.step(state, survivors, stream(cfg.seed, run, t, Stream.GENERATOR))
        error = engine.error(state)
        records.append(
            MetricsRecord(
                iteration=t + 1,
                error=error,
                comm_cost=per_iter * (t + 1),
                survivors=float(len(survivors)),
                delta=float(state.delta),
                restarted=engine.restarted(state),
            )
        )
        logger.debug(
            f"{cfg.scheme} run {run} t={t + 1}: error {error:.3e}, "
            f"{len(survivors)} survivors, delta {state.delta:.4f}"
        )
    return MetricsTrace(str(cfg.scheme), records), state


def run_experiment(
    cfg: ExperimentConfig,
    instance: ProblemInstance | None = None,
    jobs: int | None = None,
) -> list[MetricsTrace]:
    """
    Run every independent simulation of an experiment.

    Args:
        cfg: Validated experiment configuration
        instance: Problem to reuse; built from the problem stream when None
        jobs: Worker threads for runs (defaults to ``cfg.jobs``)

    Returns:
        One MetricsTrace per run, in run order
    """
    cfg.validate()
    if instance is None:
        instance = build_problem(cfg.problem, run_stream(cfg.seed, 0, Stream.PROBLEM))
    jobs = cfg.jobs if jobs is None else jobs

    def one(run: int) -> MetricsTrace:
        problem = instance
        if cfg.problem.regenerate_per_run and run > 0:
            problem = build_problem(cfg.problem, run_stream(cfg.seed, run, Stream.PROBLEM))
        return run_once(cfg, problem, run)

    logger.info(f"running {cfg.scheme}: {cfg.runs} runs × {cfg.iterations} iterations")
    if jobs <= 1:
        traces = [one(run) for run in range(cfg.runs)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(one, range(cfg.runs)))
    logger.info(f"finished {cfg.scheme}: final error {traces[0].final.error:.3e} (run 0)")
    return traces


def average_traces(traces: list[MetricsTrace]) -> MetricsTrace:
    """
    Pointwise average of equally long traces.

    The error is averaged with its sample standard deviation recorded; the
    communication cost is taken from the first trace since every run shares
    the same schedule.
    """
    if not traces:
        raise DimensionError("no traces to average")
    length = len(traces[0])
    if any(len(trace) != length for trace in traces):
        raise DimensionError(f"traces differ in length: {[len(t) for t in traces]}")

    errors = np.array([trace.errors for trace in traces])
    deltas = np.array([trace.deltas for trace in traces])
    survivors = np.array([[r.survivors for r in trace.records] for trace in traces])
    spread = errors.std(axis=0, ddof=1) if len(traces) > 1 else np.zeros(length)
    records = [
        MetricsRecord(
            iteration=record.iteration,
            error=float(errors[:, t].mean()),
            comm_cost=record.comm_cost,
            survivors=float(survivors[:, t].mean()),
            delta=float(deltas[:, t].mean()),
            error_std=float(spread[t]),
            restarted=any(trace.records[t].restarted for trace in traces),
        )
        for t, record in enumerate(traces[0].records)
    ]
    return MetricsTrace(traces[0].scheme, records, runs=len(traces))
