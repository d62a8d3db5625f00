"""Coded orthogonal iteration for eigenvectors and truncated SVD."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from subdecode.codes.decoding import decode_basis
from subdecode.codes.generator import GeneratorMatrix, restrict, sample_generator
from subdecode.codes.patterns import SparsityPattern
from subdecode.core.exceptions import DegenerateBasisError
from subdecode.core.interfaces import Scheme, SplitScheme
from subdecode.engines.base import IterationEngine
from subdecode.kernel.dense import (
    DEFAULT_RANK_TOL,
    numeric_rank,
    orthonormal_completion,
    qr_small,
    subspace_distance,
)
from subdecode.kernel.sparse import SparseMatrix, spmm, spmm_transpose
from subdecode.problems.spectral import SpectralProblem, SvdProblem
from subdecode.splitting.plan import (
    Block,
    WorkerStore,
    assign_storage,
    pad_square,
    plan_split,
    split_blocks,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OrthoIterState:
    """
    Orthonormal iterate with the block-result caches.

    ``W_hat[j]`` is the last estimate of block j's N×r result and ``W_rot``
    the same cache with the column rotation of the last QR step applied; the
    rotated cache is what the next step substitutes from.
    """

    X: np.ndarray
    W_hat: np.ndarray
    W_rot: np.ndarray
    t: int = 0
    delta: float = 0.0
    restarted: bool = False


def _sign_fix(S: np.ndarray, S_tilde: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Make the first nonzero entry of every ``S_tilde`` column non-negative."""
    S, S_tilde = S.copy(), S_tilde.copy()
    for col in range(S_tilde.shape[1]):
        nonzero = np.flatnonzero(np.abs(S_tilde[:, col]) > 1e-14)
        if len(nonzero) and S_tilde[nonzero[0], col] < 0:
            S_tilde[:, col] *= -1.0
            S[:, col] *= -1.0
    return S, S_tilde


def orthonormalize(
    Z: np.ndarray,
    accelerate: bool,
    rng: np.random.Generator,
    rank_tol: float = DEFAULT_RANK_TOL,
    support: int | None = None,
) -> tuple[np.ndarray, np.ndarray, bool]:
    """
    Next orthonormal iterate from ``Z``.

    Without acceleration this is the Q factor of ``Z``. With acceleration
    ``R = S Λ^{1/2} S̃ᵀ`` is decomposed and the iterate is
    ``Q S = Z S̃ Λ^{-1/2}``; its columns are ordered by decreasing ``Λ``.
    Rank-deficient inputs keep the well-conditioned directions and fill the
    rest with fresh random ones.

    Args:
        Z: N×r product estimate
        accelerate: Use the SVD-of-R ordering
        rng: Stream for replacement directions
        rank_tol: Relative threshold on singular values
        support: Rows allowed to be nonzero in replacement directions

    Returns:
        ``(X_next, rotation, restarted)``; ``rotation`` is the r×r matrix the
        block caches are multiplied by (the identity without acceleration)
    """
    r = Z.shape[1]
    identity = np.eye(r)
    try:
        Q, R = qr_small(Z)
    except DegenerateBasisError as e:
        U, s, _ = np.linalg.svd(Z, full_matrices=False)
        keep = numeric_rank(s, rank_tol)
        logger.warning(f"orthonormalization restart: rank {e.rank} of {r}, kept {keep}")
        return orthonormal_completion(U[:, :keep], r, rng, support), identity, True

    if not accelerate:
        return Q, identity, False

    S, sqrt_lam, S_tilde_t = np.linalg.svd(R)
    S, S_tilde = _sign_fix(S, S_tilde_t.T)
    keep = numeric_rank(sqrt_lam, rank_tol)
    if keep < r:
        logger.warning(f"degenerate Λ: {r - keep} of {r} directions replaced")
        X = orthonormal_completion(Q @ S[:, :keep], r, rng, support)
        return X, S_tilde, True
    return Q @ S, S_tilde, False


BlockProduct = Callable[[WorkerStore, int, Block, np.ndarray], np.ndarray]


def _subspace_step(
    state: OrthoIterState,
    stores: Sequence[WorkerStore],
    pattern: SparsityPattern,
    rng_t: np.random.Generator,
    survivors: Sequence[int] | np.ndarray,
    product: BlockProduct,
    *,
    accelerate: bool,
    support: int,
    generator: GeneratorMatrix | None,
    rank_tol: float,
) -> OrthoIterState:
    G = generator if generator is not None else sample_generator(pattern, state.t, rng_t)
    Gs = restrict(G, survivors)
    shape = state.W_rot.shape
    width = shape[1] * shape[2]

    coded = np.zeros((len(Gs), width))
    for row, i in enumerate(Gs.survivors):
        g_row = G.row(i)
        total = sum(
            g_row[j] * product(stores[i], j, block, state.X) for j, block in stores[i].blocks
        )
        coded[row] = np.asarray(total).ravel()

    basis = decode_basis(Gs, rank_tol)
    fallback = state.W_rot.reshape(shape[0], width)
    a, c = basis.aggregation_weights()
    Z = (a @ coded + c @ fallback).reshape(shape[1], shape[2])
    W_hat = basis.substitute(coded, fallback).reshape(shape)

    X_next, rotation, restarted = orthonormalize(Z, accelerate, rng_t, rank_tol, support)
    logger.debug(f"ortho step t={state.t}: rank {basis.rank}, restarted={restarted}")
    return OrthoIterState(X_next, W_hat, W_hat @ rotation, state.t + 1, basis.delta, restarted)


def _eigen_product(store: WorkerStore, j: int, block: Block, X: np.ndarray) -> np.ndarray:
    b = block.shape[1]
    return spmm(block, X[j * b : (j + 1) * b])  # type: ignore[arg-type]


def _gram_product(store: WorkerStore, j: int, block: Block, X: np.ndarray) -> np.ndarray:
    return spmm_transpose(block, spmm(block, X))  # type: ignore[arg-type]


def ortho_step(
    state: OrthoIterState,
    stores: Sequence[WorkerStore],
    pattern: SparsityPattern,
    rng_t: np.random.Generator,
    survivors: Sequence[int] | np.ndarray,
    *,
    accelerate: bool = False,
    support: int | None = None,
    generator: GeneratorMatrix | None = None,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> OrthoIterState:
    """
    One coded orthogonal-iteration step on column blocks of a square matrix.

    Workers return ``Σⱼ g_ij B_j X^j``; the master forms
    ``Z = W_s U D⁻¹ Vᵀ 1 + Ŵ^rot Vtilde Vtildeᵀ 1`` directly, refreshes the
    block cache, and orthonormalizes ``Z``.
    """
    return _subspace_step(
        state,
        stores,
        pattern,
        rng_t,
        survivors,
        _eigen_product,
        accelerate=accelerate,
        support=state.X.shape[0] if support is None else support,
        generator=generator,
        rank_tol=rank_tol,
    )


def svd_step(
    state: OrthoIterState,
    stores: Sequence[WorkerStore],
    pattern: SparsityPattern,
    rng_t: np.random.Generator,
    survivors: Sequence[int] | np.ndarray,
    *,
    accelerate: bool = False,
    generator: GeneratorMatrix | None = None,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> OrthoIterState:
    """Same as :func:`ortho_step` with block results ``B_jᵀ(B_j X)`` of row blocks."""
    return _subspace_step(
        state,
        stores,
        pattern,
        rng_t,
        survivors,
        _gram_product,
        accelerate=accelerate,
        support=state.X.shape[0],
        generator=generator,
        rank_tol=rank_tol,
    )


class _SubspaceEngine(IterationEngine):
    """Shared state handling of the eigen and SVD engines."""

    accelerate: bool
    reference: np.ndarray
    n_cols: int
    support: int
    r: int

    def initial_state(self, rng: np.random.Generator) -> OrthoIterState:
        X0 = orthonormal_completion(np.zeros((self.n_cols, 0)), self.r, rng, self.support)
        cache = np.zeros((self.pattern.k, self.n_cols, self.r))
        return OrthoIterState(X0, cache, cache.copy())

    def fallback(self, state: OrthoIterState) -> np.ndarray:
        return state.W_rot

    def advance(
        self,
        state: OrthoIterState,
        estimate: np.ndarray,
        delta: float,
        rng_t: np.random.Generator,
    ) -> OrthoIterState:
        Z = estimate.sum(axis=0)
        X_next, rotation, restarted = orthonormalize(
            Z, self.accelerate, rng_t, self.rank_tol, self.support
        )
        return OrthoIterState(X_next, estimate, estimate @ rotation, state.t + 1, delta, restarted)

    def error(self, state: OrthoIterState) -> float:
        return subspace_distance(state.X[: self.support], self.reference)

    def restarted(self, state: OrthoIterState) -> bool:
        return state.restarted


class OrthoEngine(_SubspaceEngine):
    """Top-r eigenvectors of a symmetric matrix split into column blocks."""

    def __init__(
        self,
        problem: SpectralProblem,
        scheme: Scheme,
        pattern: SparsityPattern,
        accelerate: bool = False,
        rank_tol: float = DEFAULT_RANK_TOL,
        shared: bool = False,
    ):
        plan = plan_split(problem.n, SplitScheme.COLUMN, pattern.k)
        super().__init__(scheme, pattern, plan, rank_tol)
        self.problem = problem
        self.accelerate = accelerate
        self.reference = problem.reference
        self.n_cols = plan.padded
        self.support = problem.n
        self.r = problem.r
        M = pad_square(problem.M, plan)
        self.stores = assign_storage(split_blocks(M, plan), pattern, shared=shared)

    @property
    def name(self) -> str:
        return "ortho"

    def coded_step(
        self, state: OrthoIterState, survivors: np.ndarray, rng_t: np.random.Generator
    ) -> OrthoIterState:
        return ortho_step(
            state,
            self.stores,
            self.pattern,
            rng_t,
            survivors,
            accelerate=self.accelerate,
            support=self.support,
            rank_tol=self.rank_tol,
        )

    def block_result(
        self, store: WorkerStore, j: int, block: Block, state: OrthoIterState
    ) -> np.ndarray:
        assert isinstance(block, SparseMatrix)
        return spmm(block, state.X[self.plan.block_slice(j)])


class SvdEngine(_SubspaceEngine):
    """Top-r right singular vectors of a data matrix split into row blocks."""

    def __init__(
        self,
        problem: SvdProblem,
        scheme: Scheme,
        pattern: SparsityPattern,
        accelerate: bool = False,
        rank_tol: float = DEFAULT_RANK_TOL,
        shared: bool = False,
    ):
        plan = plan_split(problem.data.n_rows, SplitScheme.ROW, pattern.k)
        super().__init__(scheme, pattern, plan, rank_tol)
        self.problem = problem
        self.accelerate = accelerate
        self.reference = problem.reference
        self.n_cols = problem.n
        self.support = problem.n
        self.r = problem.r
        data = problem.data.padded(plan.padded, problem.n)
        self.stores = assign_storage(split_blocks(data, plan), pattern, shared=shared)

    @property
    def name(self) -> str:
        return "svd"

    def coded_step(
        self, state: OrthoIterState, survivors: np.ndarray, rng_t: np.random.Generator
    ) -> OrthoIterState:
        return svd_step(
            state,
            self.stores,
            self.pattern,
            rng_t,
            survivors,
            accelerate=self.accelerate,
            rank_tol=self.rank_tol,
        )

    def block_result(
        self, store: WorkerStore, j: int, block: Block, state: OrthoIterState
    ) -> np.ndarray:
        return _gram_product(store, j, block, state.X)
