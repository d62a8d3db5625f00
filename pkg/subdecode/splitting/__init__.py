"""Row, column and SUMMA partitions and per-worker storage."""

from subdecode.splitting.plan import (
    Block,
    SplitPlan,
    WorkerStore,
    assign_storage,
    assign_summa_storage,
    pad_square,
    pad_vector,
    plan_split,
    split_blocks,
    stored_nnz,
)
from subdecode.splitting.reshape import kron_apply, mat, vec

__all__ = [
    "Block",
    "SplitPlan",
    "WorkerStore",
    "assign_storage",
    "assign_summa_storage",
    "kron_apply",
    "mat",
    "pad_square",
    "pad_vector",
    "plan_split",
    "split_blocks",
    "stored_nnz",
    "vec",
]
