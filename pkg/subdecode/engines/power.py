"""Coded power iteration ``x ← B x + y`` under row, column and SUMMA splits."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from subdecode.codes.decoding import DecodingBasis, decode_basis
from subdecode.codes.generator import GeneratorMatrix, restrict, sample_generator
from subdecode.codes.patterns import SparsityPattern
from subdecode.core.interfaces import Scheme, SplitScheme
from subdecode.engines.base import IterationEngine
from subdecode.engines.baselines import available_block_results, hold_unavailable
from subdecode.kernel.dense import DEFAULT_RANK_TOL
from subdecode.kernel.sparse import SparseMatrix, spmv
from subdecode.problems.pagerank import LinearSystem
from subdecode.splitting.plan import (
    Block,
    WorkerStore,
    assign_storage,
    assign_summa_storage,
    pad_square,
    pad_vector,
    plan_split,
    split_blocks,
)
from subdecode.splitting.reshape import mat, vec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RowIterState:
    x: np.ndarray
    t: int = 0
    delta: float = 0.0


@dataclass(frozen=True, eq=False)
class ColumnIterState:
    """Iterate plus the cached per-block estimates ``û_j`` of ``B_j x^j``."""

    x: np.ndarray
    u_hat: np.ndarray
    t: int = 0
    delta: float = 0.0


@dataclass(frozen=True, eq=False)
class SummaIterState:
    """Iterate plus, per column strip, cached row-piece estimates of its product."""

    x: np.ndarray
    w_hat: np.ndarray
    t: int = 0
    delta: float = 0.0


def worker_row_output(store: WorkerStore, x: np.ndarray, g_row: np.ndarray) -> np.ndarray:
    """Σⱼ g_ij (B_j x + y_j) over the row blocks the worker holds."""
    total: np.ndarray | None = None
    for j, block in store.blocks:
        term = g_row[j] * (spmv(block, x) + store.y_part(j))
        total = term if total is None else total + term
    assert total is not None
    return total


def worker_column_output(
    store: WorkerStore, x: np.ndarray, g_row: np.ndarray, b: int
) -> np.ndarray:
    """Σⱼ g_ij B_j x^j over the column blocks the worker holds."""
    total: np.ndarray | None = None
    for j, block in store.blocks:
        term = g_row[j] * spmv(block, x[j * b : (j + 1) * b])
        total = term if total is None else total + term
    assert total is not None
    return total


def _coded_rows(
    survivors: Sequence[int], output: Callable[[int], np.ndarray], width: int
) -> np.ndarray:
    """One coded result per survivor, stacked in worker order."""
    rows = [output(i) for i in survivors]
    return np.array(rows).reshape(len(rows), width)


def power_row_step(
    state: RowIterState,
    stores: Sequence[WorkerStore],
    pattern: SparsityPattern,
    rng_t: np.random.Generator,
    survivors: Sequence[int] | np.ndarray,
    *,
    generator: GeneratorMatrix | None = None,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> RowIterState:
    """
    Row-split substitute decoding.

    ``x_{t+1} = vec(V Vᵀ mat(B x_t + y) + Vtilde Vtildeᵀ mat(x_t))`` where
    ``Vᵀ mat(B x_t + y)`` is recovered from the coded results through ``L``.

    Args:
        state: Current iterate (length ``k·b``)
        stores: Worker stores, row blocks with their ``y`` parts
        pattern: Placement pattern
        rng_t: Stream for this iteration's generator
        survivors: Workers whose results arrive
        generator: Use this generator instead of sampling one
        rank_tol: Relative rank threshold

    Returns:
        Next state
    """
    G = generator if generator is not None else sample_generator(pattern, state.t, rng_t)
    Gs = restrict(G, survivors)
    b = len(state.x) // pattern.k
    coded = _coded_rows(
        Gs.survivors, lambda i: worker_row_output(stores[i], state.x, G.row(i)), b
    )
    basis = decode_basis(Gs, rank_tol)
    estimate = basis.substitute(coded, mat(state.x, b))
    logger.debug(f"row step t={state.t}: {len(Gs)} survivors, rank {basis.rank}")
    return RowIterState(vec(estimate), state.t + 1, basis.delta)


def column_slow_path(
    state: ColumnIterState, coded: np.ndarray, basis: DecodingBasis, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Update every cached block estimate, then sum them: ``(û_{t}, x_{t+1})``."""
    u_hat = basis.substitute(coded, state.u_hat)
    return u_hat, u_hat.sum(axis=0) + y


def power_col_step(
    state: ColumnIterState,
    stores: Sequence[WorkerStore],
    pattern: SparsityPattern,
    rng_t: np.random.Generator,
    survivors: Sequence[int] | np.ndarray,
    *,
    y: np.ndarray,
    generator: GeneratorMatrix | None = None,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> ColumnIterState:
    """
    Column-split substitute decoding.

    The next iterate comes from the direct weighted sum
    ``x_{t+1} = W_s (U D⁻¹ Vᵀ 1) + Û_{t−1} (Vtilde Vtildeᵀ 1) + y``; the
    cache is refreshed blockwise so both agree.

    Args:
        state: Current iterate and cache
        stores: Worker stores of column blocks
        pattern: Placement pattern
        rng_t: Stream for this iteration's generator
        survivors: Workers whose results arrive
        y: Padded right-hand side
        generator: Use this generator instead of sampling one
        rank_tol: Relative rank threshold

    Returns:
        Next state
    """
    G = generator if generator is not None else sample_generator(pattern, state.t, rng_t)
    Gs = restrict(G, survivors)
    b = len(state.x) // pattern.k
    coded = _coded_rows(
        Gs.survivors,
        lambda i: worker_column_output(stores[i], state.x, G.row(i), b),
        len(state.x),
    )
    basis = decode_basis(Gs, rank_tol)
    a, c = basis.aggregation_weights()
    x_next = a @ coded + c @ state.u_hat + y
    u_hat, _ = column_slow_path(state, coded, basis, y)
    return ColumnIterState(x_next, u_hat, state.t + 1, basis.delta)


def group_survivors(survivors: Sequence[int] | np.ndarray, group: int, size: int) -> list[int]:
    """Survivors of one SUMMA group, renumbered within the group."""
    start = group * size
    return [int(i) - start for i in survivors if start <= int(i) < start + size]


def worker_summa_output(store: WorkerStore, x_strip: np.ndarray, g_row: np.ndarray) -> np.ndarray:
    total: np.ndarray | None = None
    for i, block in store.blocks:
        term = g_row[i] * spmv(block, x_strip)
        total = term if total is None else total + term
    assert total is not None
    return total


def power_summa_step(
    state: SummaIterState,
    group_stores: Sequence[Sequence[WorkerStore]],
    pattern: SparsityPattern,
    rng_t: np.random.Generator,
    survivors: Sequence[int] | np.ndarray,
    *,
    y: np.ndarray,
    strip_width: int,
    generators: Sequence[GeneratorMatrix] | None = None,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> SummaIterState:
    """
    SUMMA-split substitute decoding.

    Column strip g is computed by its own group of workers under its own
    partial generator; each group's product is decoded row-style against its
    cached estimate and the master sums the strips.

    Args:
        state: Current iterate and per-strip caches
        group_stores: Stores of each group, in global worker order
        pattern: Placement pattern inside one group
        rng_t: Stream for this iteration's generators, drawn group by group
        survivors: Globally numbered surviving workers
        y: Padded right-hand side
        strip_width: Width of a column strip
        generators: Use these per-group generators instead of sampling
        rank_tol: Relative rank threshold

    Returns:
        Next state
    """
    n_groups = len(group_stores)
    piece = state.w_hat.shape[2]
    estimates = np.empty_like(state.w_hat)
    deltas = []
    for g in range(n_groups):
        G = (
            generators[g]
            if generators is not None
            else sample_generator(pattern, state.t, rng_t)
        )
        local = group_survivors(survivors, g, pattern.P)
        Gs = restrict(G, local)
        x_strip = state.x[g * strip_width : (g + 1) * strip_width]
        coded = _coded_rows(
            Gs.survivors,
            lambda i, G=G, held=group_stores[g], xs=x_strip: worker_summa_output(
                held[i], xs, G.row(i)
            ),
            piece,
        )
        basis = decode_basis(Gs, rank_tol)
        estimates[g] = basis.substitute(coded, state.w_hat[g])
        deltas.append(basis.delta)
    x_next = estimates.reshape(n_groups, -1).sum(axis=0) + y
    return SummaIterState(x_next, estimates, state.t + 1, float(np.mean(deltas)))


def uniform_start(n: int, padded: int) -> np.ndarray:
    return pad_vector(np.full(n, 1.0 / n), padded)


class PowerRowEngine(IterationEngine):
    """Row-split power iteration; workers return ``B_j x + y_j``."""

    def __init__(
        self,
        problem: LinearSystem,
        scheme: Scheme,
        pattern: SparsityPattern,
        rank_tol: float = DEFAULT_RANK_TOL,
        shared: bool = False,
    ):
        plan = plan_split(problem.n, SplitScheme.ROW, pattern.k)
        super().__init__(scheme, pattern, plan, rank_tol)
        self.problem = problem
        B = pad_square(problem.B, plan)
        y = pad_vector(problem.y, plan.padded)
        self.y = y
        self.stores = assign_storage(
            split_blocks(B, plan), pattern, list(mat(y, plan.block_size)), shared
        )

    @property
    def name(self) -> str:
        return "power-row"

    def initial_state(self, rng: np.random.Generator) -> RowIterState:
        return RowIterState(uniform_start(self.problem.n, self.plan.padded))

    def coded_step(
        self, state: RowIterState, survivors: np.ndarray, rng_t: np.random.Generator
    ) -> RowIterState:
        return power_row_step(
            state, self.stores, self.pattern, rng_t, survivors, rank_tol=self.rank_tol
        )

    def block_result(
        self, store: WorkerStore, j: int, block: Block, state: RowIterState
    ) -> np.ndarray:
        assert isinstance(block, SparseMatrix)
        return spmv(block, state.x) + store.y_part(j)

    def fallback(self, state: RowIterState) -> np.ndarray:
        return mat(state.x, self.plan.block_size)

    def advance(
        self,
        state: RowIterState,
        estimate: np.ndarray,
        delta: float,
        rng_t: np.random.Generator,
    ) -> RowIterState:
        return RowIterState(vec(estimate), state.t + 1, delta)

    def error(self, state: RowIterState) -> float:
        return self.problem.error(state.x)


class PowerColumnEngine(IterationEngine):
    """Column-split power iteration; workers return ``B_j x^j``."""

    def __init__(
        self,
        problem: LinearSystem,
        scheme: Scheme,
        pattern: SparsityPattern,
        rank_tol: float = DEFAULT_RANK_TOL,
        shared: bool = False,
    ):
        plan = plan_split(problem.n, SplitScheme.COLUMN, pattern.k)
        super().__init__(scheme, pattern, plan, rank_tol)
        self.problem = problem
        self.B = pad_square(problem.B, plan)
        self.y = pad_vector(problem.y, plan.padded)
        self.stores = assign_storage(split_blocks(self.B, plan), pattern, shared=shared)

    @property
    def name(self) -> str:
        return "power-column"

    def initial_state(self, rng: np.random.Generator) -> ColumnIterState:
        return ColumnIterState(
            uniform_start(self.problem.n, self.plan.padded),
            np.zeros((self.pattern.k, self.plan.padded)),
        )

    def coded_step(
        self, state: ColumnIterState, survivors: np.ndarray, rng_t: np.random.Generator
    ) -> ColumnIterState:
        return power_col_step(
            state,
            self.stores,
            self.pattern,
            rng_t,
            survivors,
            y=self.y,
            rank_tol=self.rank_tol,
        )

    def block_result(
        self, store: WorkerStore, j: int, block: Block, state: ColumnIterState
    ) -> np.ndarray:
        assert isinstance(block, SparseMatrix)
        return spmv(block, state.x[self.plan.block_slice(j)])

    def fallback(self, state: ColumnIterState) -> np.ndarray:
        return state.u_hat

    def advance(
        self,
        state: ColumnIterState,
        estimate: np.ndarray,
        delta: float,
        rng_t: np.random.Generator,
    ) -> ColumnIterState:
        return ColumnIterState(estimate.sum(axis=0) + self.y, estimate, state.t + 1, delta)

    def error(self, state: ColumnIterState) -> float:
        return self.problem.error(state.x)


class PowerSummaEngine(IterationEngine):
    """
    SUMMA-split power iteration.

    ``pattern`` is the placement inside one group of ``P/√k`` workers; there
    are ``√k`` groups, one per column strip. Baselines decide availability
    per group with the same pattern.
    """

    def __init__(
        self,
        problem: LinearSystem,
        scheme: Scheme,
        pattern: SparsityPattern,
        k: int,
        rank_tol: float = DEFAULT_RANK_TOL,
        shared: bool = False,
    ):
        side = math.isqrt(k)
        plan = plan_split(
            problem.n, SplitScheme.SUMMA, k, P=pattern.P * side, row_pieces=pattern.k
        )
        super().__init__(scheme, pattern, plan, rank_tol)
        self.problem = problem
        self.y = pad_vector(problem.y, plan.padded)
        B = pad_square(problem.B, plan)
        self.group_stores = assign_summa_storage(B, plan, pattern, shared)
        self.stores = [store for group in self.group_stores for store in group]

    @property
    def name(self) -> str:
        return "power-summa"

    @property
    def n_workers(self) -> int:
        return self.pattern.P * self.plan.side

    def initial_state(self, rng: np.random.Generator) -> SummaIterState:
        return SummaIterState(
            uniform_start(self.problem.n, self.plan.padded),
            np.zeros((self.plan.side, self.plan.row_pieces, self.plan.row_block)),
        )

    def coded_step(
        self, state: SummaIterState, survivors: np.ndarray, rng_t: np.random.Generator
    ) -> SummaIterState:
        return power_summa_step(
            state,
            self.group_stores,
            self.pattern,
            rng_t,
            survivors,
            y=self.y,
            strip_width=self.plan.block_size,
            rank_tol=self.rank_tol,
        )

    def step(
        self, state: SummaIterState, survivors: Sequence[int] | np.ndarray, rng_t: np.random.Generator
    ) -> SummaIterState:
        alive = np.asarray(survivors, dtype=int)
        if self.scheme is Scheme.CODED:
            return self.coded_step(state, alive, rng_t)

        estimates = np.empty_like(state.w_hat)
        deltas = []
        for g, stores in enumerate(self.group_stores):
            local = np.array(group_survivors(alive, g, self.pattern.P), dtype=int)
            x_strip = state.x[self.plan.block_slice(g)]
            fresh = available_block_results(
                list(stores), local, lambda _s, _j, block, xs=x_strip: spmv(block, xs)
            )
            estimates[g], delta = hold_unavailable(fresh, state.w_hat[g])
            deltas.append(delta)
        x_next = estimates.reshape(self.plan.side, -1).sum(axis=0) + self.y
        return SummaIterState(x_next, estimates, state.t + 1, float(np.mean(deltas)))

    def block_result(
        self, store: WorkerStore, j: int, block: Block, state: SummaIterState
    ) -> np.ndarray:
        assert isinstance(block, SparseMatrix) and store.group is not None
        return spmv(block, state.x[self.plan.block_slice(store.group)])

    def fallback(self, state: SummaIterState) -> np.ndarray:
        return state.w_hat

    def advance(
        self,
        state: SummaIterState,
        estimate: np.ndarray,
        delta: float,
        rng_t: np.random.Generator,
    ) -> SummaIterState:
        x_next = estimate.reshape(self.plan.side, -1).sum(axis=0) + self.y
        return SummaIterState(x_next, estimate, state.t + 1, delta)

    def error(self, state: SummaIterState) -> float:
        return self.problem.error(state.x)
