"""Substitute-decoding bases built from partial generators."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from subdecode.codes.generator import PartialGenerator
from subdecode.core.exceptions import DimensionError
from subdecode.kernel.dense import DEFAULT_RANK_TOL, svd_small

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DecodingBasis:
    """
    Row space of a partial generator and its orthogonal complement.

    With ``G_s = U D Vᵀ`` (numeric rank ρ), ``L = D⁻¹Uᵀ`` maps coded rows to
    ``Vᵀ`` applied to the uncoded rows, and ``Vtilde`` spans the complement so
    that ``V Vᵀ + Vtilde Vtildeᵀ = I_k``.
    """

    V: np.ndarray
    Vtilde: np.ndarray
    L: np.ndarray
    rank: int

    @property
    def k(self) -> int:
        return int(self.V.shape[0])

    @property
    def delta(self) -> float:
        return 1.0 - self.rank / self.k

    def projector(self) -> np.ndarray:
        return self.V @ self.V.T

    def complement_projector(self) -> np.ndarray:
        return self.Vtilde @ self.Vtilde.T

    def substitute(self, coded: np.ndarray, fallback: np.ndarray) -> np.ndarray:
        """
        Combine decoded rows with a fallback estimate.

        Returns ``V (L · coded) + Vtilde (Vtildeᵀ · fallback)``: the component
        of the uncoded rows recoverable from the coded results, completed by
        the fallback's component in the unrecoverable directions.

        Args:
            coded: ``|survivors| × m`` coded results, one row per survivor
            fallback: ``k × m`` previous estimate of the uncoded rows

        Returns:
            ``k × m`` estimate of the uncoded rows
        """
        if coded.shape[0] != self.L.shape[1]:
            raise DimensionError(
                f"{coded.shape[0]} coded rows for {self.L.shape[1]} survivors"
            )
        if fallback.shape[0] != self.k:
            raise DimensionError(f"fallback has {fallback.shape[0]} rows, expected {self.k}")
        decoded = self.V @ (self.L @ coded) if self.rank else np.zeros_like(fallback)
        if self.rank == self.k:
            return decoded
        return decoded + self.Vtilde @ (self.Vtilde.T @ fallback)

    def aggregation_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Weights that sum the substituted estimate over blocks directly.

        Returns:
            ``(a, c)`` with ``a = U D⁻¹ Vᵀ 1`` over survivors and
            ``c = Vtilde Vtildeᵀ 1`` over blocks, so that
            ``1ᵀ substitute(coded, fallback) = aᵀ coded + cᵀ fallback``
        """
        ones = np.ones(self.k)
        a = self.L.T @ (self.V.T @ ones)
        c = self.Vtilde @ (self.Vtilde.T @ ones)
        return a, c


def decode_basis(Gs: PartialGenerator, rank_tol: float = DEFAULT_RANK_TOL) -> DecodingBasis:
    """
    Substitute-decoding basis of a partial generator.

    Args:
        Gs: Surviving generator rows
        rank_tol: Relative singular-value threshold for the numeric rank

    Returns:
        DecodingBasis with ``L · G_s = Vᵀ``
    """
    svd = svd_small(Gs.rows, rank_tol)
    rho = svd.numeric_rank
    V = svd.Vt[:rho].T
    Vtilde = svd.Vt[rho:].T
    L = (svd.U[:, :rho] / svd.singular_values[:rho]).T
    return DecodingBasis(V=V, Vtilde=Vtilde, L=L, rank=rho)
