"""Random worker erasures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from subdecode.core.exceptions import ConfigurationError
from subdecode.core.interfaces import ErasureKind


@dataclass(frozen=True)
class ErasureModel:
    """
    Which workers fail in an iteration.

    ``FIXED_FRACTION`` erases exactly ``round(ε·P)`` workers chosen uniformly;
    ``BERNOULLI`` erases each worker independently with probability ε.
    """

    kind: ErasureKind = ErasureKind.FIXED_FRACTION
    epsilon: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigurationError(
                f"erasure fraction must lie in [0, 1], got {self.epsilon}", "epsilon"
            )

    def erased_count(self, P: int) -> int:
        """Number of erasures under the fixed-fraction model (half rounds up)."""
        return int(np.floor(self.epsilon * P + 0.5))

    @classmethod
    def none(cls) -> ErasureModel:
        return cls(ErasureKind.FIXED_FRACTION, 0.0)


def draw_survivors(P: int, model: ErasureModel, rng: np.random.Generator) -> np.ndarray:
    """
    Sorted indices of the workers that respond this iteration.

    Args:
        P: Number of workers
        model: Erasure model
        rng: Erasure stream for this iteration

    Returns:
        Increasing integer array of survivor indices
    """
    if model.kind is ErasureKind.BERNOULLI:
        return np.flatnonzero(rng.random(P) >= model.epsilon)
    n_survive = P - model.erased_count(P)
    return np.sort(rng.choice(P, size=n_survive, replace=False))


def draw_survivor_masks(
    P: int, model: ErasureModel, n_samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Boolean ``n_samples × P`` matrix of independent survivor draws."""
    if model.kind is ErasureKind.BERNOULLI:
        return rng.random((n_samples, P)) >= model.epsilon
    n_survive = P - model.erased_count(P)
    order = rng.permuted(np.tile(np.arange(P), (n_samples, 1)), axis=1)
    masks = np.zeros((n_samples, P), dtype=bool)
    np.put_along_axis(masks, order[:, :n_survive], True, axis=1)
    return masks
