"""Sparsity patterns deciding which blocks each worker stores."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from subdecode.core.exceptions import PatternError

logger = logging.getLogger(__name__)

# rejection sampling of the second cyclic support gives up after this many draws
_MAX_SUPPORT_DRAWS = 10_000


@dataclass(frozen=True)
class CodeParams:
    """A (P, k) code with d nonzeros per generator row."""

    P: int
    k: int
    d: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.P < 1:
            raise PatternError(f"P and k must be positive, got P={self.P}, k={self.k}")
        if not 1 <= self.d <= self.k:
            raise PatternError(f"degree d={self.d} must lie in [1, k={self.k}]")

    @property
    def rate(self) -> float:
        return self.k / self.P


class PatternKind(Enum):
    COMBINED_CYCLIC = "combined_cyclic"
    RANDOM_REGULAR = "random_regular"
    IDENTITY = "identity"
    REPLICATION = "replication"
    FRACTIONAL_REPETITION = "fractional_repetition"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class SparsityPattern:
    """Binary P×k placement matrix; block j lives on worker i iff mask[i, j]."""

    params: CodeParams
    mask: np.ndarray
    kind: PatternKind = PatternKind.CUSTOM
    distinct_waived: bool = False

    def __post_init__(self) -> None:
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != (self.params.P, self.params.k):
            raise PatternError(
                f"mask shape {mask.shape} does not match "
                f"(P, k) = ({self.params.P}, {self.params.k})"
            )
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def P(self) -> int:
        return self.params.P

    @property
    def k(self) -> int:
        return self.params.k

    def blocks_of(self, worker: int) -> np.ndarray:
        """Block indices stored at ``worker``."""
        return np.flatnonzero(self.mask[worker])

    def holders(self, block: int) -> np.ndarray:
        """Workers storing ``block``."""
        return np.flatnonzero(self.mask[:, block])

    def row_degrees(self) -> np.ndarray:
        return self.mask.sum(axis=1)

    def column_degrees(self) -> np.ndarray:
        return self.mask.sum(axis=0)

    def available_blocks(self, survivors: np.ndarray) -> np.ndarray:
        """Boolean per block: held by at least one survivor."""
        rows = self.mask[np.asarray(survivors, dtype=int)]
        return rows.any(axis=0)

    def to_text(self) -> str:
        return "\n".join("".join("1" if v else "0" for v in row) for row in self.mask)

    @classmethod
    def from_text(cls, text: str) -> SparsityPattern:
        """
        Parse one line per worker of ``k`` characters from ``{0, 1}``.

        The degree recorded in the params is the largest row degree.
        """
        rows = [line.strip() for line in text.splitlines() if line.strip()]
        if not rows:
            raise PatternError("pattern text is empty")
        width = len(rows[0])
        for number, row in enumerate(rows, start=1):
            if len(row) != width or set(row) - {"0", "1"}:
                raise PatternError(f"pattern line {number} is not {width} binary digits")
        mask = np.array([[ch == "1" for ch in row] for row in rows], dtype=bool)
        degree = int(mask.sum(axis=1).max())
        if degree == 0:
            raise PatternError("pattern has no nonzero entries")
        return cls(CodeParams(len(rows), width, degree), mask)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> SparsityPattern:
        return cls.from_text(Path(path).read_text())


def cyclic_block(k: int, support: np.ndarray) -> np.ndarray:
    """k×k cyclic matrix whose row i is the first row shifted right by i."""
    block = np.zeros((k, k), dtype=bool)
    for i in range(k):
        block[i, (np.asarray(support) + i) % k] = True
    return block


def combined_cyclic_from_supports(
    k: int, first_support: list[int], second_support: list[int]
) -> SparsityPattern:
    """Stack two cyclic blocks with the given first-row supports."""
    if len(first_support) != len(second_support):
        raise PatternError("both cyclic supports must have the same size")
    d = len(first_support)
    s1 = np.array(sorted(first_support))
    s2 = np.array(sorted(second_support))
    if np.any((s1 < 0) | (s1 >= k)) or np.any((s2 < 0) | (s2 >= k)):
        raise PatternError(f"support indices must lie in [0, {k})")
    if len(set(s1.tolist())) != d or len(set(s2.tolist())) != d:
        raise PatternError("support indices must be distinct")
    mask = np.vstack([cyclic_block(k, s1), cyclic_block(k, s2)])
    return SparsityPattern(
        CodeParams(2 * k, k, d),
        mask,
        PatternKind.COMBINED_CYCLIC,
        distinct_waived=bool(np.array_equal(s1, s2)),
    )


def make_combined_cyclic(k: int, d: int, rng: np.random.Generator) -> SparsityPattern:
    """
    Combined-cyclic (2k, k) pattern with d ones per row.

    The two cyclic blocks get independently drawn first-row supports, redrawn
    until they differ. When only one support of size d exists (d = k) the
    distinctness requirement is waived and flagged on the pattern.

    Args:
        k: Number of blocks
        d: Ones per row
        rng: Random stream

    Returns:
        SparsityPattern of shape (2k, k)
    """
    if not 1 <= d <= k:
        raise PatternError(f"degree d={d} must lie in [1, k={k}]")

    first = sorted(rng.choice(k, size=d, replace=False).tolist())
    if math.comb(k, d) == 1:
        logger.warning(
            f"only one cyclic support of size {d} exists for k={k}; "
            "distinct cyclic rows cannot be enforced"
        )
        return combined_cyclic_from_supports(k, first, first)

    for _ in range(_MAX_SUPPORT_DRAWS):
        second = sorted(rng.choice(k, size=d, replace=False).tolist())
        if second != first:
            return combined_cyclic_from_supports(k, first, second)
    raise PatternError(f"could not draw distinct cyclic supports for k={k}, d={d}")


def make_random_regular(
    P: int, k: int, d: int, rng: np.random.Generator
) -> SparsityPattern:
    """Pattern with d ones per row placed uniformly at random; columns unbalanced."""
    params = CodeParams(P, k, d)
    mask = np.zeros((P, k), dtype=bool)
    for i in range(P):
        mask[i, rng.choice(k, size=d, replace=False)] = True
    return SparsityPattern(params, mask, PatternKind.RANDOM_REGULAR)


def identity_pattern(P: int) -> SparsityPattern:
    """One block per worker and no redundancy."""
    return SparsityPattern(CodeParams(P, P, 1), np.eye(P, dtype=bool), PatternKind.IDENTITY)


def replication_pattern(P: int, copies: int = 2) -> SparsityPattern:
    """
    Each of ``P / copies`` blocks stored on ``copies`` workers.

    Worker i holds block ``i mod (P / copies)``.
    """
    if copies < 1 or P % copies:
        raise PatternError(f"P={P} is not divisible by {copies} replicas")
    k = P // copies
    mask = np.zeros((P, k), dtype=bool)
    mask[np.arange(P), np.arange(P) % k] = True
    return SparsityPattern(CodeParams(P, k, 1), mask, PatternKind.REPLICATION)


def fractional_repetition_pattern(P: int, k: int) -> SparsityPattern:
    """
    Pairs of data subsets, each pair repeated on ``P / (k/2)`` workers.

    Worker i holds subsets ``2q`` and ``2q + 1`` of pair ``q = i // group``.
    """
    if k % 2:
        raise PatternError(f"fractional repetition needs an even k, got {k}")
    pairs = k // 2
    if P % pairs:
        raise PatternError(f"P={P} is not divisible by the {pairs} subset pairs")
    group = P // pairs
    mask = np.zeros((P, k), dtype=bool)
    for i in range(P):
        q = i // group
        mask[i, 2 * q] = True
        mask[i, 2 * q + 1] = True
    return SparsityPattern(CodeParams(P, k, 2), mask, PatternKind.FRACTIONAL_REPETITION)
