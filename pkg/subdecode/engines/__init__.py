"""Iteration engines for subdecode."""

from typing import Any

from subdecode.core.exceptions import ConfigurationError, UnknownSchemeError
from subdecode.core.interfaces import ProblemKind, Scheme, SplitScheme
from subdecode.engines.base import IterationEngine, scheme_pattern
from subdecode.engines.baselines import baseline_step

__all__ = [
    "IterationEngine",
    "baseline_step",
    "build_engine",
    "get_engine_class",
    "scheme_pattern",
]

# Engine modules are imported lazily so that importing the package only
# pulls in the engine actually used


def get_power_engine(split: SplitScheme) -> type[IterationEngine]:
    """Get the power-iteration engine for a split."""
    from subdecode.engines.power import PowerColumnEngine, PowerRowEngine, PowerSummaEngine

    return {
        SplitScheme.ROW: PowerRowEngine,
        SplitScheme.COLUMN: PowerColumnEngine,
        SplitScheme.SUMMA: PowerSummaEngine,
    }[split]


def get_ortho_engine() -> type[IterationEngine]:
    """Get the eigenvector engine (column split)."""
    from subdecode.engines.ortho import OrthoEngine

    return OrthoEngine


def get_svd_engine() -> type[IterationEngine]:
    """Get the truncated-SVD engine (row split of the data)."""
    from subdecode.engines.ortho import SvdEngine

    return SvdEngine


def get_gradient_engine() -> type[IterationEngine]:
    """Get the gradient-descent engine (row split of the data)."""
    from subdecode.engines.gradient import GradientEngine

    return GradientEngine


def get_engine_class(kind: ProblemKind, split: SplitScheme) -> type[IterationEngine]:
    """
    Resolve the engine class for a problem kind and split.

    Eigen problems only run column-split and SVD / gradient problems only
    row-split; PageRank supports all three splits.
    """
    if kind is ProblemKind.PAGERANK:
        return get_power_engine(split)
    required = {
        ProblemKind.EIGEN: SplitScheme.COLUMN,
        ProblemKind.SVD: SplitScheme.ROW,
        ProblemKind.GD: SplitScheme.ROW,
    }[kind]
    if split is not required:
        raise ConfigurationError(
            f"{kind.value} problems need a {required.value} split, got {split.value}",
            "split",
        )
    if kind is ProblemKind.EIGEN:
        return get_ortho_engine()
    if kind is ProblemKind.SVD:
        return get_svd_engine()
    return get_gradient_engine()


def build_engine(
    kind: ProblemKind,
    split: SplitScheme,
    problem: Any,
    scheme: Scheme,
    pattern: Any,
    *,
    k: int | None = None,
    accelerate: bool = False,
    step_size: float = 0.5,
    normalize_step: bool = True,
    rank_tol: float | None = None,
    shared: bool = False,
) -> IterationEngine:
    """
    Construct an engine for one (problem, scheme) pair.

    Args:
        kind: Problem kind
        split: Split scheme
        problem: Problem instance matching ``kind``
        scheme: Computation scheme
        pattern: Placement pattern (per group for SUMMA)
        k: Total block count, SUMMA only
        accelerate: SVD-of-R acceleration for eigen / SVD engines
        step_size: Gradient step (relative to ``1/L`` when normalized)
        normalize_step: Divide the gradient step by the Lipschitz constant
        rank_tol: Relative rank threshold, engine default when None
        shared: Workers reference blocks instead of copying them

    Returns:
        IterationEngine
    """
    if scheme is Scheme.APPROX_GRADIENT_CODING and kind is not ProblemKind.GD:
        raise UnknownSchemeError(scheme.value, "scheme for " + kind.value)

    engine_class = get_engine_class(kind, split)
    options: dict[str, Any] = {"shared": shared}
    if rank_tol is not None:
        options["rank_tol"] = rank_tol
    if kind in (ProblemKind.EIGEN, ProblemKind.SVD):
        options["accelerate"] = accelerate
    if kind is ProblemKind.GD:
        options.update(step_size=step_size, normalize_step=normalize_step)
    if split is SplitScheme.SUMMA:
        if k is None:
            raise ConfigurationError("SUMMA engines need the total block count", "k")
        options["k"] = k
    return engine_class(problem, scheme, pattern, **options)  # type: ignore[call-arg]
