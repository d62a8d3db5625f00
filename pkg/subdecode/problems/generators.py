"""Random graph and planted-block generators."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from subdecode.core.exceptions import ProblemError
from subdecode.kernel.sparse import SparseMatrix

logger = logging.getLogger(__name__)

SBM_P_IN = 0.02
SBM_P_OUT = 0.003


def _check_probability(p: float, name: str) -> None:
    if not 0.0 <= p <= 1.0:
        raise ProblemError(f"{name} must lie in [0, 1], got {p}")


def _bernoulli_cells(
    n_rows: int, n_cols: int, p: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of i.i.d. Bernoulli(p) cells of an n_rows×n_cols grid."""
    cells = n_rows * n_cols
    count = int(rng.binomial(cells, p)) if cells else 0
    picked = rng.choice(cells, size=count, replace=False) if count else np.zeros(0, int)
    return picked // n_cols, picked % n_cols


def _symmetric(rows: np.ndarray, cols: np.ndarray, n: int) -> SparseMatrix:
    both_rows = np.concatenate([rows, cols])
    both_cols = np.concatenate([cols, rows])
    A = SparseMatrix.from_coo(both_rows, both_cols, np.ones(len(both_rows)), (n, n))
    return A


def gen_er(N: int, p: float, rng: np.random.Generator) -> SparseMatrix:
    """Undirected Erdős–Rényi graph G(N, p) without self-loops."""
    _check_probability(p, "p")
    rows, cols = _bernoulli_cells(N, N, p, rng)
    upper = rows < cols
    return _symmetric(rows[upper], cols[upper], N)


def gen_sbm(
    N: int,
    p_in: float = SBM_P_IN,
    p_out: float = SBM_P_OUT,
    rng: np.random.Generator | None = None,
) -> tuple[SparseMatrix, np.ndarray]:
    """
    Two-cluster stochastic block model.

    Args:
        N: Number of nodes; the first ``N // 2`` form cluster 0
        p_in: Intra-cluster edge probability
        p_out: Inter-cluster edge probability
        rng: Random stream

    Returns:
        ``(adjacency, labels)``
    """
    _check_probability(p_in, "p_in")
    _check_probability(p_out, "p_out")
    rng = rng if rng is not None else np.random.default_rng()
    half = N // 2
    sizes = [(0, half), (half, N)]
    rows, cols = [], []
    for start, stop in sizes:
        r, c = _bernoulli_cells(stop - start, stop - start, p_in, rng)
        upper = r < c
        rows.append(r[upper] + start)
        cols.append(c[upper] + start)
    r, c = _bernoulli_cells(half, N - half, p_out, rng)
    rows.append(r)
    cols.append(c + half)
    labels = np.zeros(N, dtype=int)
    labels[half:] = 1
    return _symmetric(np.concatenate(rows), np.concatenate(cols), N), labels


@dataclass(frozen=True, eq=False)
class PlantedMatrix:
    """Planted-block matrix plus the row/column members of each block."""

    matrix: SparseMatrix
    row_members: list[np.ndarray]
    col_members: list[np.ndarray]


def gen_planted_with_members(
    N: int,
    p_bg: float,
    blocks: Sequence[tuple[int, float]],
    rng: np.random.Generator,
) -> PlantedMatrix:
    """
    Sparse background with dense blocks on disjoint random row/column sets.

    Args:
        N: Matrix dimension
        p_bg: Background nonzero probability
        blocks: ``(size, p_block)`` per planted block
        rng: Random stream

    Returns:
        PlantedMatrix with values uniform on [0, 1]
    """
    _check_probability(p_bg, "p_bg")
    total = sum(size for size, _ in blocks)
    if total > N:
        raise ProblemError(f"planted blocks need {total} rows but N={N}")

    rows, cols = _bernoulli_cells(N, N, p_bg, rng)
    row_order = rng.permutation(N)
    col_order = rng.permutation(N)
    row_members, col_members = [], []
    offset = 0
    for size, p_block in blocks:
        _check_probability(p_block, "p_block")
        members_r = np.sort(row_order[offset : offset + size])
        members_c = np.sort(col_order[offset : offset + size])
        offset += size
        r, c = _bernoulli_cells(size, size, p_block, rng)
        rows = np.concatenate([rows, members_r[r]])
        cols = np.concatenate([cols, members_c[c]])
        row_members.append(members_r)
        col_members.append(members_c)

    linear = np.unique(rows * N + cols)
    values = rng.uniform(0.0, 1.0, size=linear.size)
    matrix = SparseMatrix.from_coo(linear // N, linear % N, values, (N, N))
    return PlantedMatrix(matrix, row_members, col_members)


def gen_planted(
    N: int,
    p_bg: float,
    blocks: Sequence[tuple[int, float]],
    rng: np.random.Generator,
) -> SparseMatrix:
    return gen_planted_with_members(N, p_bg, blocks, rng).matrix


def planted_block_members(planted: PlantedMatrix) -> np.ndarray:
    """Column-node block id (−1 for background) used to color spoke plots."""
    n = planted.matrix.n_cols
    members = np.full(n, -1, dtype=int)
    for block, cols in enumerate(planted.col_members):
        members[cols] = block
    return members
