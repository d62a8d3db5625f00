"""
subdecode: substitute decoding for coded distributed iterative computing

Simulates a master and P workers computing an iterative method over a
sparse LDGM-coded split of the problem. Whatever the surviving workers send
back is decoded into the best estimate available, with the previous
iteration's values substituted for the directions the survivors do not
cover.

Quick Start:
    >>> from subdecode import create_experiment, simulate
    >>> cfg = create_experiment("pagerank", scheme="coded-d3", runs=10)
    >>> trace = simulate(cfg)
    >>> print(trace.final.error)

Presets:
    >>> from subdecode import load_preset
    >>> configs = load_preset("twitter-scaled")
"""

__version__ = "0.1.0"

from dataclasses import replace
from typing import Any

from subdecode.codes.patterns import CodeParams, SparsityPattern, make_combined_cyclic
from subdecode.core.config import (
    DEFAULT_SEED,
    ConfigManager,
    ExperimentConfig,
    ProblemSpec,
    VerifyConfig,
)
from subdecode.core.exceptions import (
    ConfigurationError,
    DimensionError,
    NumericalError,
    PatternError,
    ProblemError,
    SubdecodeError,
    UnknownSchemeError,
)
from subdecode.core.interfaces import (
    MetricsRecord,
    MetricsTrace,
    ProblemKind,
    Scheme,
    SchemeLabel,
    SplitScheme,
)
from subdecode.simharness.erasure import ErasureModel
from subdecode.simharness.runner import average_traces, run_experiment


def create_experiment(
    problem: str = "pagerank",
    scheme: str = "coded",
    split: str = "row",
    P: int = 20,
    k: int = 10,
    d: int = 2,
    epsilon: float = 0.5,
    **kwargs: Any,
) -> ExperimentConfig:
    """
    Build a validated experiment configuration with sensible defaults.

    Args:
        problem: pagerank, eigen, svd or gd
        scheme: Scheme label such as ``uncoded`` or ``coded-d3``
        split: row, column or summa
        P: Number of workers
        k: Number of blocks
        d: Nonzeros per generator row
        epsilon: Fixed erasure fraction
        **kwargs: ExperimentConfig fields (iterations, runs, seed, ...) or
            ProblemSpec fields (n_nodes, rank, ...)

    Returns:
        ExperimentConfig

    Example:
        >>> cfg = create_experiment("gd", n_rows=500, dim=100, P=100, k=50)
    """
    problem_fields = set(ProblemSpec.__dataclass_fields__)
    problem_kwargs = {key: kwargs.pop(key) for key in list(kwargs) if key in problem_fields}
    spec = ProblemSpec(problem=ProblemKind.parse(problem), **problem_kwargs)
    if "graph" not in problem_kwargs and spec.problem is not ProblemKind.PAGERANK:
        spec = replace(
            spec,
            graph={
                ProblemKind.EIGEN: "sbm",
                ProblemKind.SVD: "planted",
                ProblemKind.GD: "gaussian",
            }[spec.problem],
        )
    cfg = ExperimentConfig(
        problem=spec,
        scheme=SchemeLabel.parse(scheme),
        split=SplitScheme.parse(split),
        code=CodeParams(P, k, d),
        erasure=ErasureModel(epsilon=epsilon),
        **kwargs,
    )
    cfg.validate()
    return cfg


def simulate(cfg: ExperimentConfig, jobs: int | None = None) -> MetricsTrace:
    """Run every configured simulation and return the averaged trace."""
    return average_traces(run_experiment(cfg, jobs=jobs))


def load_preset(name: str, **overrides: Any) -> list[ExperimentConfig]:
    """One configuration per scheme of a shipped preset."""
    return ConfigManager.from_preset(name, overrides=overrides).get_experiment_configs()


__all__ = [
    # Configuration
    "CodeParams",
    "ConfigManager",
    "DEFAULT_SEED",
    "ErasureModel",
    "ExperimentConfig",
    "ProblemSpec",
    "VerifyConfig",
    # Types
    "MetricsRecord",
    "MetricsTrace",
    "ProblemKind",
    "Scheme",
    "SchemeLabel",
    "SparsityPattern",
    "SplitScheme",
    # Exceptions
    "ConfigurationError",
    "DimensionError",
    "NumericalError",
    "PatternError",
    "ProblemError",
    "SubdecodeError",
    "UnknownSchemeError",
    # Convenience functions
    "create_experiment",
    "load_preset",
    "make_combined_cyclic",
    "simulate",
]
