"""Compressed-row sparse matrices and their products."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds

from subdecode.core.exceptions import DimensionError, NumericalError

logger = logging.getLogger(__name__)

# dense norm below this many columns, Lanczos-based estimate above
_DENSE_NORM_LIMIT = 512


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """
    Immutable compressed-row sparse matrix.

    Wraps a canonical ``scipy.sparse.csr_matrix`` (sorted column indices, no
    duplicates). Construct through :meth:`from_dense`, :meth:`from_coo` or
    :meth:`from_scipy`; each of them canonicalizes the storage.
    """

    csr: sp.csr_matrix

    def __post_init__(self) -> None:
        if not self.csr.has_canonical_format:
            raise NumericalError("SparseMatrix requires canonical CSR storage")

    @classmethod
    def from_scipy(cls, matrix: Any) -> SparseMatrix:
        csr = sp.csr_matrix(matrix, dtype=np.float64, copy=True)
        csr.sum_duplicates()
        csr.sort_indices()
        _check_finite(csr.data, "sparse matrix")
        return cls(csr)

    @classmethod
    def from_dense(cls, values: np.ndarray) -> SparseMatrix:
        dense = np.asarray(values, dtype=np.float64)
        if dense.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got {dense.ndim}-D")
        return cls.from_scipy(sp.csr_matrix(dense))

    @classmethod
    def from_coo(
        cls,
        rows: np.ndarray,
        cols: np.ndarray,
        values: np.ndarray,
        shape: tuple[int, int],
    ) -> SparseMatrix:
        """Build from triplets; duplicate coordinates are summed."""
        coo = sp.coo_matrix(
            (np.asarray(values, dtype=np.float64), (rows, cols)), shape=shape
        )
        return cls.from_scipy(coo.tocsr())

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> SparseMatrix:
        return cls.from_scipy(sp.csr_matrix((n_rows, n_cols)))

    @classmethod
    def identity(cls, n: int) -> SparseMatrix:
        return cls.from_scipy(sp.identity(n, format="csr"))

    @property
    def n_rows(self) -> int:
        return int(self.csr.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.csr.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def row_offsets(self) -> np.ndarray:
        return self.csr.indptr

    @property
    def col_indices(self) -> np.ndarray:
        return self.csr.indices

    @property
    def values(self) -> np.ndarray:
        return self.csr.data

    @property
    def nnz(self) -> int:
        return int(self.csr.nnz)

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray()

    def transpose(self) -> SparseMatrix:
        return SparseMatrix.from_scipy(self.csr.T)

    def scaled(self, factor: float) -> SparseMatrix:
        return SparseMatrix.from_scipy(self.csr * factor)

    def row_block(self, start: int, stop: int) -> SparseMatrix:
        return SparseMatrix.from_scipy(self.csr[start:stop, :])

    def column_block(self, start: int, stop: int) -> SparseMatrix:
        return SparseMatrix.from_scipy(self.csr[:, start:stop])

    def block(self, rows: slice, cols: slice) -> SparseMatrix:
        return SparseMatrix.from_scipy(self.csr[rows, cols])

    def padded(self, n_rows: int, n_cols: int) -> SparseMatrix:
        """Return a copy with zero rows and columns appended."""
        if n_rows < self.n_rows or n_cols < self.n_cols:
            raise DimensionError(
                f"cannot pad {self.shape} down to {(n_rows, n_cols)}"
            )
        coo = self.csr.tocoo()
        return SparseMatrix.from_coo(coo.row, coo.col, coo.data, (n_rows, n_cols))

    def copy(self) -> SparseMatrix:
        return SparseMatrix(self.csr.copy())

    def is_symmetric(self, tol: float = 1e-10) -> bool:
        if self.n_rows != self.n_cols:
            return False
        diff = self.csr - self.csr.T
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= tol

    def __matmul__(self, other: np.ndarray) -> np.ndarray:
        operand = np.asarray(other)
        if operand.ndim == 1:
            return spmv(self, operand)
        return spmm(self, operand)


def _check_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"{what} contains non-finite entries")


def spmv(B: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """
    Sparse matrix-vector product ``B @ x``.

    Args:
        B: Sparse matrix
        x: Vector of length ``B.n_cols``

    Returns:
        Vector of length ``B.n_rows``
    """
    vector = np.asarray(x, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] != B.n_cols:
        raise DimensionError(
            f"spmv: matrix is {B.shape}, vector has shape {vector.shape}"
        )
    return np.asarray(B.csr @ vector)


def spmm(B: SparseMatrix, X: np.ndarray) -> np.ndarray:
    """
    Sparse times dense product ``B @ X``, column by column.

    Args:
        B: Sparse matrix
        X: Dense matrix with ``B.n_cols`` rows

    Returns:
        Dense matrix of shape ``(B.n_rows, X.shape[1])``
    """
    dense = np.asarray(X, dtype=np.float64)
    if dense.ndim != 2 or dense.shape[0] != B.n_cols:
        raise DimensionError(f"spmm: matrix is {B.shape}, operand is {dense.shape}")
    return np.asarray(B.csr @ dense)


def spmm_transpose(B: SparseMatrix, X: np.ndarray) -> np.ndarray:
    """Product ``Bᵀ @ X`` without materializing the transpose."""
    dense = np.asarray(X, dtype=np.float64)
    if dense.shape[0] != B.n_rows:
        raise DimensionError(
            f"spmm_transpose: matrix is {B.shape}, operand is {dense.shape}"
        )
    return np.asarray(B.csr.T @ dense)


def spectral_norm(B: SparseMatrix) -> float:
    """Largest singular value of ``B``."""
    if B.nnz == 0:
        return 0.0
    if min(B.shape) <= _DENSE_NORM_LIMIT:
        return float(np.linalg.norm(B.to_dense(), 2))
    sigma = svds(B.csr, k=1, return_singular_vectors=False, random_state=0)
    return float(sigma[0])


def column_block_norm(B: SparseMatrix, k: int) -> float:
    """
    Column-block norm ``√k · maxⱼ ‖Bⱼ‖₂`` over ``k`` equal column blocks.

    Args:
        B: Matrix whose column count is divisible by ``k``
        k: Number of column blocks

    Returns:
        The column-block norm
    """
    if k < 1 or B.n_cols % k != 0:
        raise DimensionError(f"{B.n_cols} columns do not split into {k} blocks")
    width = B.n_cols // k
    largest = max(
        spectral_norm(B.column_block(j * width, (j + 1) * width)) for j in range(k)
    )
    return float(np.sqrt(k) * largest)
