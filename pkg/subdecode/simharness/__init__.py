"""Simulated master/worker harness."""

from subdecode.simharness.costs import comm_cost_per_iter
from subdecode.simharness.erasure import ErasureModel, draw_survivor_masks, draw_survivors
from subdecode.simharness.seeding import Stream, run_stream, stream

# The experiment runner depends on subdecode.core.config, which imports this
# package; import it from subdecode.simharness.runner directly.

__all__ = [
    "ErasureModel",
    "Stream",
    "comm_cost_per_iter",
    "draw_survivor_masks",
    "draw_survivors",
    "run_stream",
    "stream",
]
