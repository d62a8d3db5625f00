"""Symmetric eigenproblems: shifted normalized Laplacians and SVD data."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh, svds

from subdecode.core.exceptions import ProblemError
from subdecode.kernel.sparse import SparseMatrix

logger = logging.getLogger(__name__)

# dense reference decompositions up to this dimension
_DENSE_ORACLE_LIMIT = 3000


class IsolateMode(Enum):
    REJECT = "reject"
    DROP = "drop"


@dataclass(frozen=True, eq=False)
class SpectralProblem:
    """Top-``r`` invariant subspace of a symmetric matrix ``M``."""

    M: SparseMatrix
    r: int
    reference: np.ndarray
    kept_nodes: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.M.n_rows


@dataclass(frozen=True, eq=False)
class SvdProblem:
    """Top-``r`` right singular subspace of an n×N data matrix."""

    data: SparseMatrix
    r: int
    reference: np.ndarray

    @property
    def n(self) -> int:
        return self.data.n_cols


def top_eigenvectors(M: SparseMatrix, r: int) -> np.ndarray:
    """Orthonormal basis of the ``r`` largest-eigenvalue eigenvectors."""
    n = M.n_rows
    if r >= n:
        raise ProblemError(f"r={r} must be smaller than the dimension {n}")
    if n <= _DENSE_ORACLE_LIMIT:
        _, vectors = scipy.linalg.eigh(M.to_dense(), subset_by_index=[n - r, n - 1])
        return vectors[:, ::-1].copy()
    _, vectors = eigsh(M.csr, k=r, which="LA")
    return vectors[:, ::-1].copy()


def top_right_singular_vectors(data: SparseMatrix, r: int) -> np.ndarray:
    if r >= min(data.shape):
        raise ProblemError(f"r={r} must be smaller than {min(data.shape)}")
    if max(data.shape) <= _DENSE_ORACLE_LIMIT:
        _, _, Vt = np.linalg.svd(data.to_dense(), full_matrices=False)
        return Vt[:r].T.copy()
    _, s, Vt = svds(data.csr, k=r, random_state=0)
    order = np.argsort(s)[::-1]
    return Vt[order].T.copy()


def build_shifted_laplacian(
    adjacency: SparseMatrix,
    r: int = 2,
    isolate_mode: IsolateMode = IsolateMode.REJECT,
) -> SpectralProblem:
    """
    ``M = I + D^{-1/2} A D^{-1/2}``, whose spectrum lies in [0, 2].

    Args:
        adjacency: Symmetric adjacency matrix
        r: Number of leading eigenvectors sought
        isolate_mode: REJECT raises on isolated nodes, DROP removes them

    Returns:
        SpectralProblem with its dense-oracle reference subspace
    """
    if not adjacency.is_symmetric():
        raise ProblemError("adjacency must be symmetric")
    A = adjacency.csr
    degrees = np.asarray(A.sum(axis=1)).ravel()
    isolated = np.flatnonzero(degrees == 0)
    kept = None
    if isolated.size:
        if isolate_mode is IsolateMode.REJECT:
            raise ProblemError(
                f"{isolated.size} isolated nodes; normalization needs positive degrees"
            )
        kept = np.flatnonzero(degrees > 0)
        A = A[kept][:, kept]
        degrees = degrees[kept]
        logger.warning(f"dropped {isolated.size} isolated nodes")

    scale = sp.diags(1.0 / np.sqrt(degrees))
    M = SparseMatrix.from_scipy(sp.identity(A.shape[0]) + scale @ A @ scale)
    return SpectralProblem(M=M, r=r, reference=top_eigenvectors(M, r), kept_nodes=kept)


def build_svd_problem(data: SparseMatrix, r: int) -> SvdProblem:
    return SvdProblem(data=data, r=r, reference=top_right_singular_vectors(data, r))


def cluster_labels(X: np.ndarray) -> np.ndarray:
    """
    Two-way partition from the sign of the second leading eigenvector.

    Args:
        X: N×r eigenvector estimate with r ≥ 2

    Returns:
        Integer labels in {0, 1}
    """
    if X.shape[1] < 2:
        raise ProblemError("cluster_labels needs at least two eigenvectors")
    return (X[:, 1] >= 0).astype(int)


def clustering_accuracy(labels: np.ndarray, truth: np.ndarray) -> float:
    """Agreement of two binary labelings, up to swapping the labels."""
    agreement = float(np.mean(np.asarray(labels) == np.asarray(truth)))
    return max(agreement, 1.0 - agreement)
