"""Base iteration engine for subdecode."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from subdecode.codes.patterns import (
    CodeParams,
    PatternKind,
    SparsityPattern,
    fractional_repetition_pattern,
    identity_pattern,
    make_combined_cyclic,
    make_random_regular,
    replication_pattern,
)
from subdecode.core.exceptions import ConfigurationError, PatternError
from subdecode.core.interfaces import Scheme
from subdecode.engines.baselines import baseline_step
from subdecode.kernel.dense import DEFAULT_RANK_TOL
from subdecode.splitting.plan import Block, SplitPlan, WorkerStore

logger = logging.getLogger(__name__)


def scheme_pattern(
    scheme: Scheme,
    params: CodeParams,
    rng: np.random.Generator,
    pattern_kind: PatternKind = PatternKind.COMBINED_CYCLIC,
    pattern_file: str | Path | None = None,
) -> SparsityPattern:
    """
    Placement pattern a scheme uses on ``params.P`` workers.

    Coded and storage-matched replication share the LDGM pattern; uncoded and
    noiseless give every worker its own block; communication-matched
    replication keeps two copies of ``P/2`` blocks; approximate gradient
    coding repeats pairs of subsets.

    Args:
        scheme: Computation scheme
        params: Code parameters (P, k, d)
        rng: Stream for random patterns
        pattern_kind: Constructor for coded patterns
        pattern_file: Pattern to load instead of drawing one

    Returns:
        SparsityPattern with ``P`` rows
    """
    P, k, d = params.P, params.k, params.d
    if scheme in (Scheme.UNCODED, Scheme.NOISELESS):
        return identity_pattern(P)
    if scheme is Scheme.REPLICATION_COMM:
        return replication_pattern(P, copies=2)
    if scheme is Scheme.APPROX_GRADIENT_CODING:
        return fractional_repetition_pattern(P, k)

    if pattern_file is not None:
        pattern = SparsityPattern.load(pattern_file)
        if pattern.P != P or pattern.k != k:
            raise PatternError(
                f"pattern file is {pattern.P}×{pattern.k}, expected {P}×{k}"
            )
        return pattern
    if pattern_kind is PatternKind.COMBINED_CYCLIC:
        if P != 2 * k:
            raise ConfigurationError(
                f"combined-cyclic patterns need P = 2k, got P={P}, k={k}", "pattern"
            )
        return make_combined_cyclic(k, d, rng)
    if pattern_kind is PatternKind.RANDOM_REGULAR:
        return make_random_regular(P, k, d, rng)
    raise ConfigurationError(f"pattern kind {pattern_kind.value} cannot be drawn", "pattern")


class IterationEngine(ABC):
    """
    Base class for master/worker iteration engines.

    An engine owns the split plan, the worker stores and the placement
    pattern of one (problem, scheme) pair. The coded scheme goes through
    :meth:`coded_step`; every other scheme is an availability rule handled by
    :func:`subdecode.engines.baselines.baseline_step`, which calls back into
    :meth:`block_result`, :meth:`fallback` and :meth:`advance`.
    """

    def __init__(
        self,
        scheme: Scheme,
        pattern: SparsityPattern,
        plan: SplitPlan,
        rank_tol: float = DEFAULT_RANK_TOL,
    ):
        """
        Initialize the engine.

        Args:
            scheme: Computation scheme
            pattern: Placement pattern for the scheme
            plan: Split plan of the system
            rank_tol: Relative rank threshold for decoding
        """
        self.scheme = scheme
        self.pattern = pattern
        self.plan = plan
        self.rank_tol = rank_tol
        self.stores: list[WorkerStore] = []

    @property
    @abstractmethod
    def name(self) -> str:
        """Engine name - must be implemented by subclasses."""
        pass

    @property
    def n_workers(self) -> int:
        return self.pattern.P

    @abstractmethod
    def initial_state(self, rng: np.random.Generator) -> Any:
        """Starting master state."""
        pass

    @abstractmethod
    def coded_step(self, state: Any, survivors: np.ndarray, rng_t: np.random.Generator) -> Any:
        """One substitute-decoding iteration."""
        pass

    @abstractmethod
    def block_result(self, store: WorkerStore, j: int, block: Block, state: Any) -> np.ndarray:
        """Uncoded result of block ``j`` computed at a worker holding it."""
        pass

    @abstractmethod
    def fallback(self, state: Any) -> np.ndarray:
        """Per-block estimate used where a baseline has no fresh result."""
        pass

    @abstractmethod
    def advance(
        self, state: Any, estimate: np.ndarray, delta: float, rng_t: np.random.Generator
    ) -> Any:
        """Form the next state from per-block estimates."""
        pass

    @abstractmethod
    def error(self, state: Any) -> float:
        """Scheme-independent error metric of a state."""
        pass

    def restarted(self, state: Any) -> bool:
        return False

    def step(
        self, state: Any, survivors: Sequence[int] | np.ndarray, rng_t: np.random.Generator
    ) -> Any:
        """
        Run one iteration.

        Args:
            state: Current master state
            survivors: Workers whose results arrive
            rng_t: Per-iteration code stream

        Returns:
            Next master state
        """
        alive = np.asarray(survivors, dtype=int)
        if self.scheme is Scheme.CODED:
            return self.coded_step(state, alive, rng_t)
        return baseline_step(self.scheme, state, self, alive, rng_t)
