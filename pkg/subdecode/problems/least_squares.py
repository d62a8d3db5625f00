"""Least-squares regression ``min ‖y − A x‖``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from subdecode.core.exceptions import ProblemError


@dataclass(frozen=True, eq=False)
class LeastSquaresProblem:
    """
    Least squares with objective ``‖y − A x‖² / (2n)``.

    The gradient ``Aᵀ(A x − y) / n`` splits over row subsets, so subset
    gradients sum to the full gradient.
    """

    A_data: np.ndarray
    y_obs: np.ndarray
    x_star: np.ndarray

    @property
    def n(self) -> int:
        return int(self.A_data.shape[0])

    @property
    def dim(self) -> int:
        return int(self.A_data.shape[1])

    @classmethod
    def from_data(cls, A: np.ndarray, y: np.ndarray) -> LeastSquaresProblem:
        """Solve the normal equations for the reference minimizer."""
        A = np.asarray(A, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if A.ndim != 2 or y.shape != (A.shape[0],):
            raise ProblemError(f"data {A.shape} and observations {y.shape} disagree")
        if A.shape[0] < A.shape[1]:
            raise ProblemError(f"need n >= dim for a unique minimizer, got {A.shape}")
        x_star = scipy.linalg.solve(A.T @ A, A.T @ y, assume_a="pos")
        return cls(A_data=A, y_obs=y, x_star=x_star)

    def objective(self, x: np.ndarray) -> float:
        residual = self.y_obs - self.A_data @ x
        return float(residual @ residual / (2 * self.n))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.A_data.T @ (self.A_data @ x - self.y_obs) / self.n

    def lipschitz(self) -> float:
        """Largest eigenvalue of ``AᵀA / n``."""
        return float(scipy.linalg.eigvalsh(self.A_data.T @ self.A_data / self.n)[-1])


def subset_gradient(
    A_part: np.ndarray, y_part: np.ndarray, x: np.ndarray, n_total: int
) -> np.ndarray:
    """Gradient contribution ``A_jᵀ(A_j x − y_j) / n`` of one data subset."""
    return A_part.T @ (A_part @ x - y_part) / n_total


def build_least_squares(n: int, dim: int, rng: np.random.Generator) -> LeastSquaresProblem:
    """
    Gaussian data matrix and observations.

    Args:
        n: Number of samples
        dim: Parameter dimension, at most ``n``
        rng: Random stream

    Returns:
        LeastSquaresProblem with its normal-equation minimizer
    """
    A = rng.standard_normal((n, dim))
    y = rng.standard_normal(n)
    return LeastSquaresProblem.from_data(A, y)
