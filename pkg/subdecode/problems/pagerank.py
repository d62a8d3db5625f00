"""PageRank systems ``x = c·r + (1 − c)·A x``."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp

from subdecode.core.exceptions import ConfigurationError, ProblemError
from subdecode.kernel.sparse import SparseMatrix, spmv

logger = logging.getLogger(__name__)

DEFAULT_DAMPING = 0.15
FIXED_POINT_TOL = 1e-13
MAX_REFERENCE_ITERS = 100_000


class DanglingMode(Enum):
    """Treatment of zero columns (nodes without out-links)."""

    KEEP = "keep"
    UNIFORM = "uniform"


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """A contraction ``x = B x + y`` with its fixed point."""

    B: SparseMatrix
    y: np.ndarray
    x_star: np.ndarray

    @property
    def n(self) -> int:
        return self.B.n_rows

    def error(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(x[: self.n] - self.x_star))


@dataclass(frozen=True, eq=False)
class PageRankProblem(LinearSystem):
    """PageRank with damping ``c``; ``B = (1 − c) A`` and ``y = c · r_pref``."""

    A: SparseMatrix | None = None
    c: float = DEFAULT_DAMPING
    r_pref: np.ndarray | None = None


def normalize_columns(
    A_raw: SparseMatrix, dangling_mode: DanglingMode = DanglingMode.KEEP
) -> SparseMatrix:
    """
    Scale every nonzero column to sum 1.

    Args:
        A_raw: Non-negative square matrix, ``A_raw[i, j] > 0`` for a link j → i
        dangling_mode: KEEP leaves zero columns as they are, UNIFORM fills
            them with ``1/N``

    Returns:
        Column-normalized matrix
    """
    if A_raw.nnz and float(A_raw.values.min()) < 0:
        raise ProblemError("normalize_columns needs non-negative entries")
    csc = A_raw.csr.tocsc()
    sums = np.asarray(csc.sum(axis=0)).ravel()
    scale = np.divide(1.0, sums, out=np.zeros_like(sums), where=sums > 0)
    normalized = csc @ sp.diags(scale)

    dangling = np.flatnonzero(sums == 0)
    if dangling.size and dangling_mode is DanglingMode.UNIFORM:
        n = A_raw.n_rows
        fill = sp.csc_matrix(
            (
                np.full(n * dangling.size, 1.0 / n),
                (np.tile(np.arange(n), dangling.size), np.repeat(dangling, n)),
            ),
            shape=A_raw.shape,
        )
        normalized = normalized + fill
    if dangling.size:
        logger.debug(f"{dangling.size} dangling columns handled as {dangling_mode.value}")
    return SparseMatrix.from_scipy(normalized)


def solve_fixed_point(
    B: SparseMatrix, y: np.ndarray, tol: float = FIXED_POINT_TOL
) -> np.ndarray:
    """Iterate ``x ← B x + y`` from ``y`` until successive iterates differ by < tol."""
    x = np.asarray(y, dtype=np.float64).copy()
    for _ in range(MAX_REFERENCE_ITERS):
        x_next = spmv(B, x) + y
        if np.linalg.norm(x_next - x) < tol:
            return x_next
        x = x_next
    raise ProblemError(
        f"reference iteration did not reach {tol} in {MAX_REFERENCE_ITERS} steps"
    )


def build_pagerank(
    A_raw: SparseMatrix,
    c: float = DEFAULT_DAMPING,
    r_pref: np.ndarray | None = None,
    dangling_mode: DanglingMode = DanglingMode.KEEP,
) -> PageRankProblem:
    """
    Build a PageRank system and its reference solution.

    Args:
        A_raw: Adjacency with ``A_raw[i, j] = 1`` for a link j → i
        c: Damping constant in (0, 1)
        r_pref: Preference vector, uniform when omitted
        dangling_mode: Zero-column treatment

    Returns:
        PageRankProblem with ``x_star`` from noiseless iteration
    """
    if not 0.0 < c < 1.0:
        raise ConfigurationError(f"damping must lie in (0, 1), got {c}", "damping")
    if A_raw.n_rows != A_raw.n_cols:
        raise ProblemError(f"adjacency must be square, got {A_raw.shape}")
    n = A_raw.n_rows
    A = normalize_columns(A_raw, dangling_mode)
    pref = np.full(n, 1.0 / n) if r_pref is None else np.asarray(r_pref, dtype=np.float64)
    if pref.shape != (n,):
        raise ProblemError(f"preference vector has shape {pref.shape}, expected ({n},)")

    B = A.scaled(1.0 - c)
    y = c * pref
    x_star = solve_fixed_point(B, y)
    logger.info(f"built PageRank system with N={n}, nnz={A.nnz}")
    return PageRankProblem(B=B, y=y, x_star=x_star, A=A, c=c, r_pref=pref)


def synthetic_contraction(
    n: int, norm: float, rng: np.random.Generator, density: float = 1.0
) -> LinearSystem:
    """
    Random ``x = B x + y`` with ``‖B‖₂ = norm``.

    Args:
        n: Dimension
        norm: Target spectral norm (< 1 for a contraction)
        rng: Random stream
        density: Fraction of nonzero entries of B

    Returns:
        LinearSystem with its exact fixed point
    """
    dense = rng.standard_normal((n, n))
    if density < 1.0:
        dense *= rng.random((n, n)) < density
    sigma = float(np.linalg.norm(dense, 2))
    if sigma == 0.0:
        raise ProblemError("sampled matrix is zero; raise the density")
    dense *= norm / sigma
    y = rng.standard_normal(n)
    x_star = np.linalg.solve(np.eye(n) - dense, y)
    return LinearSystem(B=SparseMatrix.from_dense(dense), y=y, x_star=x_star)
