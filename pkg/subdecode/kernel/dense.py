"""Dense decompositions of small matrices."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from subdecode.core.exceptions import DegenerateBasisError, DimensionError, NumericalError

logger = logging.getLogger(__name__)

DEFAULT_RANK_TOL = 1e-10
SMALL_MATRIX_LIMIT = 4096


@dataclass(frozen=True, eq=False)
class SvdResult:
    """Full singular value decomposition ``M = U diag(σ) Vt``."""

    U: np.ndarray
    singular_values: np.ndarray
    Vt: np.ndarray
    numeric_rank: int

    def reconstruct(self) -> np.ndarray:
        m, n = self.U.shape[0], self.Vt.shape[0]
        sigma = np.zeros((m, n))
        q = len(self.singular_values)
        sigma[:q, :q] = np.diag(self.singular_values)
        return self.U @ sigma @ self.Vt


def _as_finite_matrix(M: np.ndarray, what: str) -> np.ndarray:
    matrix = np.asarray(M, dtype=np.float64)
    if matrix.ndim != 2:
        raise DimensionError(f"{what}: expected a 2-D array, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NumericalError(f"{what}: input contains non-finite entries")
    return matrix


def numeric_rank(singular_values: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    """Count singular values above ``rank_tol · σ_max``."""
    if singular_values.size == 0:
        return 0
    sigma_max = float(singular_values[0])
    if sigma_max <= 0.0:
        return 0
    return int(np.count_nonzero(singular_values > rank_tol * sigma_max))


def svd_small(
    M: np.ndarray,
    rank_tol: float = DEFAULT_RANK_TOL,
    limit: int = SMALL_MATRIX_LIMIT,
) -> SvdResult:
    """
    Full SVD of a small dense matrix.

    Args:
        M: Matrix to factor
        rank_tol: Relative threshold for the numeric rank
        limit: Largest allowed ``min(n_rows, n_cols)``

    Returns:
        SvdResult with square ``U`` and ``Vt``
    """
    matrix = _as_finite_matrix(M, "svd_small")
    m, n = matrix.shape
    if min(m, n) > limit:
        raise DimensionError(f"svd_small: {matrix.shape} exceeds limit {limit}")

    if matrix.size == 0:
        return SvdResult(np.eye(m), np.zeros(0), np.eye(n), 0)

    U, s, Vt = np.linalg.svd(matrix, full_matrices=True)
    return SvdResult(U, s, Vt, numeric_rank(s, rank_tol))


def qr_small(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Thin QR with a non-negative ``R`` diagonal.

    Args:
        M: Tall matrix, ``n_rows >= n_cols``

    Returns:
        ``(Q, R)`` with ``QᵀQ = I`` and ``QR = M``

    Raises:
        DegenerateBasisError: if a diagonal entry of ``R`` is below
            ``1e-12 · ‖M‖_F``
    """
    matrix = _as_finite_matrix(M, "qr_small")
    m, n = matrix.shape
    if m < n:
        raise DimensionError(f"qr_small: need n_rows >= n_cols, got {matrix.shape}")

    Q, R = np.linalg.qr(matrix, mode="reduced")
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    Q = Q * signs
    R = signs[:, None] * R

    floor = 1e-12 * float(np.linalg.norm(matrix))
    diagonal = np.diag(R)
    deficient = int(np.count_nonzero(diagonal <= floor))
    if deficient:
        raise DegenerateBasisError(
            f"qr_small: {deficient} of {n} columns are linearly dependent",
            rank=n - deficient,
        )
    return Q, R


def symeig_small(M: np.ndarray, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Args:
        M: Symmetric matrix
        tol: Allowed asymmetry, relative to ``max(1, max|M|)``

    Returns:
        ``(eigvals, eigvecs)`` with eigenvectors as columns
    """
    matrix = _as_finite_matrix(M, "symeig_small")
    if matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"symeig_small: matrix is not square {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    if float(np.max(np.abs(matrix - matrix.T), initial=0.0)) > tol * scale:
        raise NumericalError("symeig_small: input is not symmetric")

    eigvals, eigvecs = scipy.linalg.eigh((matrix + matrix.T) / 2.0)
    return eigvals[::-1].copy(), eigvecs[:, ::-1].copy()


def orthonormality_defect(X: np.ndarray) -> float:
    """Frobenius norm of ``XᵀX − I``."""
    gram = X.T @ X
    return float(np.linalg.norm(gram - np.eye(gram.shape[0])))


def subspace_distance(X: np.ndarray, Y: np.ndarray) -> float:
    """
    Distance ``‖XXᵀ − YYᵀ‖_F / √(2r)`` between column spans.

    Invariant to sign flips and reordering of the columns; lies in ``[0, 1]``.

    Args:
        X: Matrix with orthonormal columns
        Y: Matrix of the same shape with orthonormal columns

    Returns:
        Normalized projector distance
    """
    left = _as_finite_matrix(X, "subspace_distance")
    right = _as_finite_matrix(Y, "subspace_distance")
    if left.shape != right.shape:
        raise DimensionError(f"subspace_distance: {left.shape} vs {right.shape}")
    for operand in (left, right):
        gram = operand.T @ operand
        if float(np.max(np.abs(gram - np.eye(gram.shape[0])), initial=0.0)) > 1e-6:
            raise NumericalError("subspace_distance: columns are not orthonormal")

    r = left.shape[1]
    if r == 0:
        return 0.0
    # ‖XXᵀ − YYᵀ‖²_F = 2r − 2‖XᵀY‖²_F for orthonormal X and Y
    overlap = float(np.sum((left.T @ right) ** 2))
    return float(np.sqrt(max(0.0, 1.0 - overlap / r)))


def orthonormal_completion(
    kept: np.ndarray,
    n_total: int,
    rng: np.random.Generator,
    support: int | None = None,
) -> np.ndarray:
    """
    Extend orthonormal columns to ``n_total`` columns with random directions.

    Args:
        kept: N×q matrix with orthonormal columns (q may be 0)
        n_total: Desired column count
        rng: Stream for the fresh directions
        support: Only the first ``support`` rows of the fresh directions are
            nonzero (padding rows stay zero)

    Returns:
        N×n_total matrix with orthonormal columns whose first q columns are ``kept``
    """
    N, q = kept.shape
    support = N if support is None else support
    if n_total > support:
        raise DimensionError(f"cannot fit {n_total} orthonormal columns in R^{support}")
    if q >= n_total:
        return kept[:, :n_total]
    fresh = np.zeros((N, n_total - q))
    fresh[:support] = rng.standard_normal((support, n_total - q))
    if q:
        fresh -= kept @ (kept.T @ fresh)
        fresh -= kept @ (kept.T @ fresh)
    basis, _ = np.linalg.qr(fresh, mode="reduced")
    return np.hstack([kept, basis])
