"""Monte-Carlo and exhaustive estimates of the rank-loss factor δ."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from subdecode.codes.patterns import SparsityPattern
from subdecode.core.exceptions import CombinatorialLimitError, ConfigurationError
from subdecode.kernel.dense import DEFAULT_RANK_TOL
from subdecode.simharness.erasure import ErasureModel, draw_survivor_masks

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 1_000_000
# generator draws per batched SVD call
_BATCH = 4096


@dataclass(frozen=True, eq=False)
class ProjectorSamples:
    """Per-sample ranks plus the running mean of ``V Vᵀ``."""

    ranks: np.ndarray
    mean_projector: np.ndarray
    k: int

    @property
    def deltas(self) -> np.ndarray:
        return 1.0 - self.ranks / self.k

    @property
    def delta(self) -> float:
        return float(self.deltas.mean())

    @property
    def standard_error(self) -> float:
        if len(self.ranks) < 2:
            return 0.0
        return float(self.deltas.std(ddof=1) / np.sqrt(len(self.ranks)))


def _batched_ranks(
    pattern: SparsityPattern,
    survivor_masks: np.ndarray,
    rng: np.random.Generator,
    rank_tol: float,
    with_projector: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Ranks (and the summed projectors) of masked generators, one per mask row.

    Erased rows are zeroed instead of removed, which leaves the row space and
    therefore both the rank and ``V Vᵀ`` unchanged.
    """
    n = survivor_masks.shape[0]
    P, k = pattern.mask.shape
    support = pattern.mask
    nnz = int(support.sum())
    ranks = np.empty(n, dtype=np.int64)
    projector_sum = np.zeros((k, k))

    for start in range(0, n, _BATCH):
        stop = min(n, start + _BATCH)
        batch = stop - start
        values = np.zeros((batch, P, k))
        values[:, support] = rng.standard_normal((batch, nnz))
        values *= survivor_masks[start:stop, :, None]

        if with_projector:
            _, s, Vt = np.linalg.svd(values, full_matrices=True)
        else:
            s = np.linalg.svd(values, compute_uv=False)
        sigma_max = s[:, :1]
        kept = (s > rank_tol * sigma_max) & (sigma_max > 0)
        ranks[start:stop] = kept.sum(axis=1)
        if with_projector:
            weights = np.zeros((batch, k))
            weights[:, : kept.shape[1]] = kept
            projector_sum += np.einsum("nik,ni,nil->kl", Vt, weights, Vt)

    return ranks, projector_sum


def sample_projectors(
    pattern: SparsityPattern,
    erasure: ErasureModel,
    n_samples: int,
    rng: np.random.Generator,
    rank_tol: float = DEFAULT_RANK_TOL,
    with_projector: bool = True,
) -> ProjectorSamples:
    """
    Draw (survivor set, generator) pairs and record rank and ``V Vᵀ``.

    Args:
        pattern: Sparsity pattern
        erasure: Erasure model for the survivor sets
        n_samples: Number of draws
        rng: Random stream
        rank_tol: Relative rank threshold
        with_projector: Also accumulate the mean projector

    Returns:
        ProjectorSamples
    """
    if n_samples < 1:
        raise ConfigurationError("n_samples must be at least 1", "n_samples")
    masks = draw_survivor_masks(pattern.P, erasure, n_samples, rng)
    ranks, projector_sum = _batched_ranks(pattern, masks, rng, rank_tol, with_projector)
    return ProjectorSamples(ranks, projector_sum / n_samples, pattern.k)


def estimate_delta(
    pattern: SparsityPattern,
    erasure: ErasureModel,
    n_samples: int,
    rng: np.random.Generator,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> float:
    """Monte-Carlo mean of ``1 − rank(G_s)/k``."""
    samples = sample_projectors(
        pattern, erasure, n_samples, rng, rank_tol, with_projector=False
    )
    logger.debug(
        f"delta estimate {samples.delta:.4f} ± {samples.standard_error:.4f} "
        f"from {n_samples} samples"
    )
    return samples.delta


def exact_delta_small(
    pattern: SparsityPattern,
    n_erased: int,
    value_samples: int,
    rng: np.random.Generator,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> float:
    """
    Average ``1 − rank/k`` over every survivor subset of size ``P − n_erased``.

    Args:
        pattern: Sparsity pattern
        n_erased: Erased workers per subset
        value_samples: Generator draws per subset
        rng: Random stream for generator values
        rank_tol: Relative rank threshold

    Returns:
        Enumeration average of δ
    """
    P = pattern.P
    if not 0 <= n_erased <= P:
        raise ConfigurationError(f"n_erased must lie in [0, {P}]", "n_erased")
    count = math.comb(P, P - n_erased)
    if count > ENUMERATION_LIMIT:
        raise CombinatorialLimitError(
            f"{count} survivor subsets exceed the enumeration limit "
            f"{ENUMERATION_LIMIT}",
            count,
        )
    if n_erased == P:
        return 1.0

    subsets = np.zeros((count, P), dtype=bool)
    for row, subset in enumerate(itertools.combinations(range(P), P - n_erased)):
        subsets[row, list(subset)] = True
    masks = np.repeat(subsets, value_samples, axis=0)
    ranks, _ = _batched_ranks(pattern, masks, rng, rank_tol, with_projector=False)
    return float(1.0 - ranks.mean() / pattern.k)
