"""The vec/mat reshaping operators."""

import numpy as np

from subdecode.core.exceptions import DimensionError


def vec(X: np.ndarray) -> np.ndarray:
    """Concatenate the rows of ``X`` into one vector."""
    return np.asarray(X).reshape(-1).copy()


def mat(v: np.ndarray, b: int) -> np.ndarray:
    """Stack consecutive length-``b`` slices of ``v`` as rows."""
    vector = np.asarray(v)
    if b < 1 or vector.ndim != 1 or vector.shape[0] % b:
        raise DimensionError(f"vector of shape {vector.shape} is not divisible by b={b}")
    return vector.reshape(-1, b).copy()


def kron_apply(A: np.ndarray, v: np.ndarray, b: int) -> np.ndarray:
    """
    Apply ``A ⊗ I_b`` to ``v`` without forming the Kronecker product.

    Args:
        A: k'×k matrix
        v: Vector of length ``k·b``
        b: Block length

    Returns:
        ``vec(A · mat(v, b))`` of length ``k'·b``
    """
    matrix = np.asarray(A, dtype=np.float64)
    if matrix.ndim != 2 or np.asarray(v).shape != (matrix.shape[1] * b,):
        raise DimensionError(
            f"kron_apply: A is {matrix.shape}, v has shape {np.asarray(v).shape}, b={b}"
        )
    return vec(matrix @ mat(v, b))
