"""Block partitions of the system matrix and per-worker storage."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from subdecode.codes.patterns import SparsityPattern
from subdecode.core.exceptions import ConfigurationError, DimensionError
from subdecode.core.interfaces import SplitScheme
from subdecode.kernel.sparse import SparseMatrix

logger = logging.getLogger(__name__)

Block = SparseMatrix | np.ndarray


@dataclass(frozen=True)
class SplitPlan:
    """
    How an N-dimensional system is cut into blocks.

    For row and column splits ``b·k = N + pad``. For SUMMA the column side is
    cut into ``side = √k`` strips of width ``b`` and each strip into
    ``row_pieces`` row blocks of height ``row_block``; both sides cover the
    same padded dimension.
    """

    scheme: SplitScheme
    n: int
    k: int
    block_size: int
    pad: int
    row_pieces: int = 0
    row_block: int = 0

    @property
    def padded(self) -> int:
        return self.n + self.pad

    @property
    def side(self) -> int:
        return math.isqrt(self.k) if self.scheme is SplitScheme.SUMMA else self.k

    def block_slice(self, j: int) -> slice:
        return slice(j * self.block_size, (j + 1) * self.block_size)

    def row_piece_slice(self, i: int) -> slice:
        return slice(i * self.row_block, (i + 1) * self.row_block)


def plan_split(
    n: int,
    scheme: SplitScheme,
    k: int,
    P: int | None = None,
    row_pieces: int | None = None,
) -> SplitPlan:
    """
    Ceiling-divide ``n`` into blocks for the given split.

    Args:
        n: System dimension (rows for a data matrix)
        scheme: Row, column or SUMMA split
        k: Number of blocks (a perfect square for SUMMA)
        P: Worker count, checked for SUMMA group sizing
        row_pieces: SUMMA only: row blocks per column strip (defaults to √k)

    Returns:
        SplitPlan
    """
    if n < 1:
        raise ConfigurationError(f"dimension must be positive, got {n}", "n")
    if k < 1:
        raise ConfigurationError(f"split count must be positive, got {k}", "k")

    if scheme is not SplitScheme.SUMMA:
        b = -(-n // k)
        return SplitPlan(scheme, n, k, b, b * k - n)

    side = math.isqrt(k)
    if side * side != k:
        raise ConfigurationError(f"SUMMA needs a perfect-square k, got {k}", "k")
    if P is not None and (P % side or P // side < side):
        raise ConfigurationError(
            f"SUMMA needs P divisible by √k={side} with groups of at least {side}, "
            f"got P={P}",
            "P",
        )
    pieces = side if row_pieces is None else row_pieces
    unit = math.lcm(side, pieces)
    padded = -(-n // unit) * unit
    return SplitPlan(
        scheme,
        n,
        k,
        padded // side,
        padded - n,
        row_pieces=pieces,
        row_block=padded // pieces,
    )


@dataclass(frozen=True, eq=False)
class WorkerStore:
    """Blocks (and right-hand-side parts) held by one simulated worker."""

    worker_id: int
    blocks: tuple[tuple[int, Block], ...]
    y_parts: tuple[tuple[int, np.ndarray], ...] = ()
    group: int | None = None
    _y_lookup: dict[int, np.ndarray] = field(
        default_factory=dict, init=False, repr=False
    )

    def __post_init__(self) -> None:
        self._y_lookup.update(dict(self.y_parts))

    @property
    def block_indices(self) -> list[int]:
        return [j for j, _ in self.blocks]

    def y_part(self, j: int) -> np.ndarray:
        return self._y_lookup[j]

    def stored_nnz(self) -> int:
        return sum(
            blk.nnz if isinstance(blk, SparseMatrix) else int(np.count_nonzero(blk))
            for _, blk in self.blocks
        )


def pad_square(B: SparseMatrix, plan: SplitPlan) -> SparseMatrix:
    """Append zero rows and columns up to the padded dimension."""
    if B.n_rows != B.n_cols or B.n_rows != plan.n:
        raise DimensionError(f"expected a {plan.n}×{plan.n} matrix, got {B.shape}")
    return B.padded(plan.padded, plan.padded)


def pad_vector(y: np.ndarray, length: int) -> np.ndarray:
    out = np.zeros(length)
    out[: len(y)] = y
    return out


def split_blocks(B: SparseMatrix | np.ndarray, plan: SplitPlan) -> list[Block]:
    """
    Cut a padded operand into its ``k`` row or column blocks.

    Row splits cut rows (so non-square data matrices work); column splits cut
    columns of a square matrix.
    """
    if plan.scheme is SplitScheme.COLUMN:
        if not isinstance(B, SparseMatrix):
            raise DimensionError("column splits need a sparse system matrix")
        return [B.column_block(s.start, s.stop) for s in map(plan.block_slice, range(plan.k))]
    if plan.scheme is SplitScheme.ROW:
        if B.shape[0] != plan.padded:
            raise DimensionError(f"expected {plan.padded} rows, got {B.shape[0]}")
        if isinstance(B, SparseMatrix):
            return [B.row_block(s.start, s.stop) for s in map(plan.block_slice, range(plan.k))]
        return [np.array(B[plan.block_slice(j)]) for j in range(plan.k)]
    raise DimensionError("SUMMA blocks are cut by assign_summa_storage")


def _copy_block(block: Block, shared: bool) -> Block:
    if shared:
        return block
    return block.copy()


def assign_storage(
    blocks: Sequence[Block],
    pattern: SparsityPattern,
    y_parts: Sequence[np.ndarray] | None = None,
    shared: bool = False,
) -> list[WorkerStore]:
    """
    Give each worker the blocks its pattern row selects.

    Args:
        blocks: The ``k`` blocks, in block order
        pattern: P×k placement
        y_parts: Optional per-block right-hand-side parts (row splits)
        shared: Store references instead of independent copies

    Returns:
        One WorkerStore per worker
    """
    if len(blocks) != pattern.k:
        raise DimensionError(f"{len(blocks)} blocks for a pattern with k={pattern.k}")
    stores = []
    for worker in range(pattern.P):
        held = pattern.blocks_of(worker)
        stores.append(
            WorkerStore(
                worker_id=worker,
                blocks=tuple((int(j), _copy_block(blocks[j], shared)) for j in held),
                y_parts=tuple((int(j), y_parts[j].copy()) for j in held)
                if y_parts is not None
                else (),
            )
        )
    return stores


def assign_summa_storage(
    B: SparseMatrix,
    plan: SplitPlan,
    group_pattern: SparsityPattern,
    shared: bool = False,
) -> list[list[WorkerStore]]:
    """
    Per column strip g, give group g's workers their row blocks of that strip.

    Workers are numbered globally: group g owns ``g·P_g .. (g+1)·P_g − 1``.
    The block index inside a group is the row piece index.
    """
    if plan.scheme is not SplitScheme.SUMMA:
        raise DimensionError("assign_summa_storage needs a SUMMA plan")
    if group_pattern.k != plan.row_pieces:
        raise DimensionError(
            f"group pattern has k={group_pattern.k}, plan has {plan.row_pieces} row pieces"
        )
    group_size = group_pattern.P
    groups = []
    for g in range(plan.side):
        strip = plan.block_slice(g)
        blocks = [B.block(plan.row_piece_slice(i), strip) for i in range(plan.row_pieces)]
        stores = assign_storage(blocks, group_pattern, shared=shared)
        groups.append(
            [
                WorkerStore(
                    worker_id=g * group_size + s.worker_id,
                    blocks=s.blocks,
                    group=g,
                )
                for s in stores
            ]
        )
    return groups


def stored_nnz(stores: Sequence[WorkerStore]) -> int:
    """Total nonzeros held across workers, counting every replica."""
    return sum(store.stored_nnz() for store in stores)
