"""Sparse storage and small dense decompositions."""

from subdecode.kernel.dense import (
    DEFAULT_RANK_TOL,
    SvdResult,
    numeric_rank,
    orthonormal_completion,
    orthonormality_defect,
    qr_small,
    subspace_distance,
    svd_small,
    symeig_small,
)
from subdecode.kernel.sparse import (
    SparseMatrix,
    column_block_norm,
    spectral_norm,
    spmm,
    spmm_transpose,
    spmv,
)

__all__ = [
    "DEFAULT_RANK_TOL",
    "SparseMatrix",
    "SvdResult",
    "column_block_norm",
    "numeric_rank",
    "orthonormal_completion",
    "orthonormality_defect",
    "qr_small",
    "spectral_norm",
    "spmm",
    "spmm_transpose",
    "spmv",
    "subspace_distance",
    "svd_small",
    "symeig_small",
]
