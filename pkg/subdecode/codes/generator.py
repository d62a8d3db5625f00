"""Per-iteration Gaussian generator matrices and their surviving rows."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from subdecode.codes.patterns import SparsityPattern
from subdecode.core.exceptions import DimensionError


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Gaussian values on the support of a sparsity pattern, for iteration t."""

    pattern: SparsityPattern
    values: np.ndarray
    t: int

    def __post_init__(self) -> None:
        if self.values.shape != self.pattern.mask.shape:
            raise DimensionError(
                f"generator values {self.values.shape} do not match "
                f"pattern {self.pattern.mask.shape}"
            )

    def row(self, worker: int) -> np.ndarray:
        return self.values[worker]


@dataclass(frozen=True, eq=False)
class PartialGenerator:
    """Rows of a generator matrix belonging to the surviving workers."""

    survivors: tuple[int, ...]
    rows: np.ndarray

    @property
    def k(self) -> int:
        return int(self.rows.shape[1])

    def __len__(self) -> int:
        return len(self.survivors)


def sample_generator(
    pattern: SparsityPattern, t: int, rng: np.random.Generator
) -> GeneratorMatrix:
    """
    Draw i.i.d. standard Gaussian values on the pattern's support.

    Entries are filled in row-major support order, so the same stream
    always yields the same matrix.

    Args:
        pattern: Fixed sparsity pattern
        t: Iteration index recorded on the result
        rng: Stream keyed by (seed, t)

    Returns:
        GeneratorMatrix for iteration ``t``
    """
    values = np.zeros(pattern.mask.shape)
    values[pattern.mask] = rng.standard_normal(int(pattern.mask.sum()))
    return GeneratorMatrix(pattern, values, t)


def fixed_generator(
    pattern: SparsityPattern, values: np.ndarray, t: int = 0
) -> GeneratorMatrix:
    """Wrap hand-chosen values, zeroing anything off the support."""
    masked = np.where(pattern.mask, np.asarray(values, dtype=np.float64), 0.0)
    return GeneratorMatrix(pattern, masked, t)


def restrict(G: GeneratorMatrix, survivors: Sequence[int] | np.ndarray) -> PartialGenerator:
    """Row-submatrix of ``G`` for the survivors, in increasing worker order."""
    ordered = tuple(sorted(int(i) for i in survivors))
    P = G.values.shape[0]
    if any(i < 0 or i >= P for i in ordered):
        raise DimensionError(f"survivor indices must lie in [0, {P})")
    rows = G.values[list(ordered)] if ordered else np.zeros((0, G.values.shape[1]))
    return PartialGenerator(ordered, rows)
