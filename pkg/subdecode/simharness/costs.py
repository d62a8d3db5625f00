"""Per-iteration communication cost, in transmitted reals per worker."""

from __future__ import annotations

import math

from subdecode.core.exceptions import ConfigurationError
from subdecode.core.interfaces import ProblemKind, Scheme, SplitScheme


def _power_cost(scheme: Scheme, split: SplitScheme, N: int, k: int, P: int, d: int) -> float:
    if split is SplitScheme.SUMMA:
        side = math.isqrt(k)
        strip = N / side
        group = P / side
        return {
            Scheme.CODED: 2 * strip,
            Scheme.REPLICATION_COMM: 2 * strip,
            Scheme.REPLICATION_STORAGE: strip * (1 + d),
            Scheme.UNCODED: strip + N / group,
            Scheme.NOISELESS: strip + N / group,
        }[scheme]

    replicated = P / 2
    if split is SplitScheme.ROW:
        return {
            Scheme.CODED: N * (1 + 1 / k),
            Scheme.REPLICATION_COMM: N * (1 + 1 / replicated),
            Scheme.REPLICATION_STORAGE: N * (1 + d / k),
            Scheme.UNCODED: N * (1 + 1 / P),
            Scheme.NOISELESS: N * (1 + 1 / P),
        }[scheme]

    # column split: each worker receives its sub-vectors and returns length-N results
    return {
        Scheme.CODED: N * (1 + d / k),
        Scheme.REPLICATION_COMM: N * (1 + 1 / replicated),
        Scheme.REPLICATION_STORAGE: N * (d + d / k),
        Scheme.UNCODED: N * (1 + 1 / P),
        Scheme.NOISELESS: N * (1 + 1 / P),
    }[scheme]


def comm_cost_per_iter(
    scheme: Scheme,
    problem: ProblemKind,
    split: SplitScheme,
    N: int,
    k: int,
    P: int,
    d: int,
    r: int = 1,
) -> float:
    """
    Reals each worker receives plus sends in one iteration.

    Args:
        scheme: Computation scheme
        problem: Problem family (GD counts the parameter dimension as N)
        split: Matrix split
        N: System dimension (parameter dimension for GD)
        k: Number of coded blocks
        P: Number of workers
        d: Blocks stored per worker for coded and storage-matched schemes
        r: Number of vectors iterated jointly

    Returns:
        Communication cost per iteration
    """
    if scheme is Scheme.APPROX_GRADIENT_CODING and problem is not ProblemKind.GD:
        raise ConfigurationError(
            "approx_gradient_coding applies to gradient descent only", "scheme"
        )

    if problem is ProblemKind.GD:
        if scheme is Scheme.REPLICATION_STORAGE:
            return 2.0 * (1 + d) * N
        return 2.0 * N

    if problem is ProblemKind.SVD:
        if scheme is Scheme.REPLICATION_STORAGE:
            return 2.0 * (1 + d) * N * r
        return 2.0 * N * r

    return float(_power_cost(scheme, split, N, k, P, d) * r)
