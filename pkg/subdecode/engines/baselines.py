"""Uncoded, replicated and fractional-repetition baselines."""

from __future__ import annotations

import logging
from collections.abc import Callable
from typing import TYPE_CHECKING, Any

import numpy as np

from subdecode.core.exceptions import UnknownSchemeError
from subdecode.core.interfaces import Scheme
from subdecode.splitting.plan import Block, WorkerStore

if TYPE_CHECKING:
    from subdecode.engines.base import IterationEngine

logger = logging.getLogger(__name__)

BlockFn = Callable[[WorkerStore, int, Block], np.ndarray]


def available_block_results(
    stores: list[WorkerStore], survivors: np.ndarray, compute: BlockFn
) -> dict[int, np.ndarray]:
    """
    Fresh result of every block held by some survivor.

    Each block is taken from its lowest-numbered surviving holder.
    """
    fresh: dict[int, np.ndarray] = {}
    for worker in sorted(int(i) for i in survivors):
        store = stores[worker]
        for j, block in store.blocks:
            if j not in fresh:
                fresh[j] = compute(store, j, block)
    return fresh


def hold_unavailable(
    fresh: dict[int, np.ndarray], fallback: np.ndarray
) -> tuple[np.ndarray, float]:
    """
    Fresh rows where available, fallback rows elsewhere.

    Returns:
        ``(estimate, delta)`` with ``delta`` the fraction of held blocks
    """
    estimate = np.array(fallback, dtype=np.float64, copy=True)
    for j, result in fresh.items():
        estimate[j] = result
    k = fallback.shape[0]
    return estimate, 1.0 - len(fresh) / k


def fractional_repetition_average(
    stores: list[WorkerStore], survivors: np.ndarray, compute: BlockFn, k: int
) -> tuple[np.ndarray, float]:
    """
    Average of the distinct surviving group sums, scaled to all groups.

    Each worker transmits the sum of its group's partial results; survivors
    of the same group send the same sum, so it is counted once. The mean of
    the recovered sums is multiplied by the number of groups, which keeps
    the estimate on the scale of the full sum. The scaled sum of a group is
    placed on the row of its first block.

    Returns:
        ``(estimate, delta)`` with one row per block
    """
    seen: set[tuple[int, ...]] = set()
    rows: dict[int, np.ndarray] = {}
    for worker in sorted(int(i) for i in survivors):
        store = stores[worker]
        group = tuple(store.block_indices)
        if group in seen:
            continue
        seen.add(group)
        rows[group[0]] = sum(compute(store, j, block) for j, block in store.blocks)
    if not rows:
        return np.zeros((0,)), 1.0
    n_groups = k // len(next(iter(seen)))
    scale = n_groups / len(rows)
    width = next(iter(rows.values())).shape
    estimate = np.zeros((k, *width))
    for j, total in rows.items():
        estimate[j] = scale * total
    covered = sum(len(group) for group in seen)
    return estimate, 1.0 - covered / k


def baseline_step(
    scheme: Scheme,
    state: Any,
    engine: IterationEngine,
    survivors: np.ndarray,
    rng_t: np.random.Generator,
) -> Any:
    """
    One iteration of a non-coded scheme.

    uncoded / noiseless: blocks whose only holder survives are updated, the
    rest keep the engine's fallback. replication_comm and replication_storage
    count a block as available when any holder survives. approx_gradient_coding
    averages the distinct surviving group sums, scaled to all groups.

    Args:
        scheme: Baseline scheme
        state: Current master state
        engine: Engine supplying block results, fallback and update
        survivors: Surviving workers
        rng_t: Per-iteration stream (used only for degenerate restarts)

    Returns:
        Next master state
    """
    def compute(store: WorkerStore, j: int, block: Block) -> np.ndarray:
        return engine.block_result(store, j, block, state)

    if scheme in (
        Scheme.NOISELESS,
        Scheme.UNCODED,
        Scheme.REPLICATION_COMM,
        Scheme.REPLICATION_STORAGE,
    ):
        fresh = available_block_results(engine.stores, survivors, compute)
        estimate, delta = hold_unavailable(fresh, engine.fallback(state))
        return engine.advance(state, estimate, delta, rng_t)

    if scheme is Scheme.APPROX_GRADIENT_CODING:
        fallback = engine.fallback(state)
        estimate, delta = fractional_repetition_average(
            engine.stores, survivors, compute, engine.pattern.k
        )
        if estimate.size == 0:
            estimate = np.zeros_like(fallback)
        return engine.advance(state, estimate, delta, rng_t)

    raise UnknownSchemeError(scheme.value, "baseline scheme")
