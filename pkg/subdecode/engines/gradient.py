"""Coded full-batch gradient descent over row subsets of the data."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from subdecode.codes.decoding import decode_basis
from subdecode.codes.generator import GeneratorMatrix, restrict, sample_generator
from subdecode.codes.patterns import SparsityPattern
from subdecode.core.exceptions import ConfigurationError
from subdecode.core.interfaces import Scheme, SplitScheme
from subdecode.engines.base import IterationEngine
from subdecode.kernel.dense import DEFAULT_RANK_TOL
from subdecode.problems.least_squares import LeastSquaresProblem, subset_gradient
from subdecode.splitting.plan import (
    Block,
    WorkerStore,
    assign_storage,
    pad_vector,
    plan_split,
    split_blocks,
)

logger = logging.getLogger(__name__)

GradFn = Callable[[WorkerStore, int, Block, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class GradIterState:
    """Parameter vector with the cached partial-gradient estimates ``ŵ_j``."""

    x: np.ndarray
    w_hat: np.ndarray
    t: int = 0
    step_size: float = 0.5
    delta: float = 0.0


def grad_step(
    state: GradIterState,
    stores: Sequence[WorkerStore],
    pattern: SparsityPattern,
    rng_t: np.random.Generator,
    survivors: Sequence[int] | np.ndarray,
    grad_fn: GradFn,
    *,
    generator: GeneratorMatrix | None = None,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> GradIterState:
    """
    One coded gradient step.

    Worker i sends ``Σⱼ g_ij w_j`` for the subset gradients it can compute;
    the master substitutes the unrecoverable directions from the previous
    estimates and steps along their sum.

    Args:
        state: Current parameters and gradient cache
        stores: Worker stores of data subsets
        pattern: Placement pattern
        rng_t: Stream for this iteration's generator
        survivors: Workers whose results arrive
        grad_fn: Gradient of one stored subset at ``x``
        generator: Use this generator instead of sampling one
        rank_tol: Relative rank threshold

    Returns:
        Next state
    """
    G = generator if generator is not None else sample_generator(pattern, state.t, rng_t)
    Gs = restrict(G, survivors)
    coded = np.zeros((len(Gs), len(state.x)))
    for row, i in enumerate(Gs.survivors):
        g_row = G.row(i)
        for j, block in stores[i].blocks:
            coded[row] += g_row[j] * grad_fn(stores[i], j, block, state.x)

    basis = decode_basis(Gs, rank_tol)
    w_hat = basis.substitute(coded, state.w_hat)
    x_next = state.x - state.step_size * w_hat.sum(axis=0)
    return GradIterState(x_next, w_hat, state.t + 1, state.step_size, basis.delta)


class GradientEngine(IterationEngine):
    """
    Least-squares gradient descent with the data rows split into ``k`` subsets.

    Subsets are padded with zero rows to equal size; zero rows contribute
    nothing to the gradient. Baselines drop the gradients of unavailable
    subsets instead of holding them.
    """

    def __init__(
        self,
        problem: LeastSquaresProblem,
        scheme: Scheme,
        pattern: SparsityPattern,
        step_size: float = 0.5,
        normalize_step: bool = True,
        rank_tol: float = DEFAULT_RANK_TOL,
        shared: bool = False,
    ):
        if step_size <= 0:
            raise ConfigurationError(f"step size must be positive, got {step_size}", "step_size")
        plan = plan_split(problem.n, SplitScheme.ROW, pattern.k)
        super().__init__(scheme, pattern, plan, rank_tol)
        self.problem = problem
        self.step_size = step_size / problem.lipschitz() if normalize_step else step_size

        data = np.zeros((plan.padded, problem.dim))
        data[: problem.n] = problem.A_data
        y = pad_vector(problem.y_obs, plan.padded)
        y_parts = [y[plan.block_slice(j)] for j in range(pattern.k)]
        self.stores = assign_storage(split_blocks(data, plan), pattern, y_parts, shared)
        logger.debug(f"gradient engine: k={pattern.k}, step {self.step_size:.4g}")

    @property
    def name(self) -> str:
        return "gradient"

    def subset_gradient(
        self, store: WorkerStore, j: int, block: Block, x: np.ndarray
    ) -> np.ndarray:
        assert isinstance(block, np.ndarray)
        return subset_gradient(block, store.y_part(j), x, self.problem.n)

    def initial_state(self, rng: np.random.Generator) -> GradIterState:
        dim = self.problem.dim
        return GradIterState(np.zeros(dim), np.zeros((self.pattern.k, dim)), 0, self.step_size)

    def coded_step(
        self, state: GradIterState, survivors: np.ndarray, rng_t: np.random.Generator
    ) -> GradIterState:
        return grad_step(
            state,
            self.stores,
            self.pattern,
            rng_t,
            survivors,
            self.subset_gradient,
            rank_tol=self.rank_tol,
        )

    def block_result(
        self, store: WorkerStore, j: int, block: Block, state: GradIterState
    ) -> np.ndarray:
        return self.subset_gradient(store, j, block, state.x)

    def fallback(self, state: GradIterState) -> np.ndarray:
        return np.zeros_like(state.w_hat)

    def advance(
        self,
        state: GradIterState,
        estimate: np.ndarray,
        delta: float,
        rng_t: np.random.Generator,
    ) -> GradIterState:
        x_next = state.x - state.step_size * estimate.sum(axis=0)
        return GradIterState(x_next, estimate, state.t + 1, state.step_size, delta)

    def error(self, state: GradIterState) -> float:
        return self.problem.objective(state.x)
