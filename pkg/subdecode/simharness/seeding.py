"""Deterministic random streams keyed by run, iteration and purpose."""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    """Purpose tag mixed into every derived seed."""

    GENERATOR = 0
    ERASURE = 1
    INIT = 2
    PATTERN = 3
    PROBLEM = 4
    SAMPLES = 5


def stream(master_seed: int, run: int, t: int, purpose: Stream) -> np.random.Generator:
    """
    Independent generator for one (run, iteration, purpose) triple.

    Streams for different purposes never overlap, so the code values drawn
    in an iteration are independent of which workers failed in it.
    """
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(run, t, int(purpose)))
    return np.random.default_rng(sequence)


def run_stream(master_seed: int, run: int, purpose: Stream) -> np.random.Generator:
    """Stream for once-per-run draws (initial point, pattern, problem)."""
    return stream(master_seed, run, 0, purpose)
