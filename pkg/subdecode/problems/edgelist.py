"""SNAP-style edge-list reading and writing."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from subdecode.core.exceptions import ProblemError
from subdecode.kernel.sparse import SparseMatrix

logger = logging.getLogger(__name__)


def load_edge_list(path: str | Path, directed: bool = True) -> SparseMatrix:
    """
    Read whitespace-separated ``src dst`` pairs into an adjacency matrix.

    Lines starting with ``#`` and blank lines are skipped. Node ids are
    compacted to ``0..N−1`` in increasing id order. A link src → dst sets
    ``A[dst, src] = 1`` so that columns hold out-links.

    Args:
        path: Edge-list file
        directed: When False every edge is also added in reverse

    Returns:
        Binary adjacency matrix
    """
    sources, targets = [], []
    with open(path) as handle:
        for number, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) != 2:
                raise ProblemError(f"expected 'src dst', got {stripped!r}", number)
            try:
                src, dst = int(fields[0]), int(fields[1])
            except ValueError as e:
                raise ProblemError(f"non-integer node id in {stripped!r}", number) from e
            sources.append(src)
            targets.append(dst)

    if not sources:
        raise ProblemError(f"edge list {path} contains no edges")

    ids, compact = np.unique(np.array(sources + targets), return_inverse=True)
    n_edges = len(sources)
    src_idx, dst_idx = compact[:n_edges], compact[n_edges:]
    if not directed:
        src_idx, dst_idx = (
            np.concatenate([src_idx, dst_idx]),
            np.concatenate([dst_idx, src_idx]),
        )
    n = len(ids)
    # repeated edges collapse to a single unit entry
    merged = SparseMatrix.from_coo(dst_idx, src_idx, np.ones(len(src_idx)), (n, n)).csr
    coo = merged.tocoo()
    binary = SparseMatrix.from_coo(coo.row, coo.col, np.ones(merged.nnz), (n, n))
    logger.info(f"loaded {n_edges} edges over {len(ids)} nodes from {path}")
    return binary


def write_edge_list(adjacency: SparseMatrix, path: str | Path, header: str = "") -> None:
    """Write one ``src dst`` line per nonzero ``A[dst, src]``, sorted by src then dst."""
    coo = adjacency.csr.tocoo()
    order = np.lexsort((coo.row, coo.col))
    lines = [f"# {line}" for line in header.splitlines()]
    lines += [f"{coo.col[i]} {coo.row[i]}" for i in order]
    Path(path).write_text("\n".join(lines) + "\n")


def write_triplets(matrix: SparseMatrix, path: str | Path, header: str = "") -> None:
    """
    Write ``row col value`` lines with shortest round-trip float formatting.

    A leading ``# shape R C`` comment records the dimensions, so trailing
    all-zero rows and columns survive a reload.
    """
    coo = matrix.csr.tocoo()
    lines = [f"# shape {matrix.n_rows} {matrix.n_cols}"]
    lines += [f"# {line}" for line in header.splitlines()]
    lines += [
        f"{r} {c} {float(v)!r}" for r, c, v in zip(coo.row, coo.col, coo.data, strict=True)
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def _shape_comment(comment: str, number: int) -> tuple[int, int] | None:
    fields = comment.lstrip("#").split()
    if not fields or fields[0] != "shape":
        return None
    try:
        n_rows, n_cols = (int(value) for value in fields[1:])
    except ValueError as e:
        raise ProblemError(f"expected '# shape rows cols', got {comment!r}", number) from e
    if n_rows <= 0 or n_cols <= 0:
        raise ProblemError(f"shape must be positive, got {n_rows}×{n_cols}", number)
    return n_rows, n_cols


def load_triplets(path: str | Path) -> SparseMatrix:
    """
    Read a ``row col value`` file written by :func:`write_triplets`.

    The ``# shape R C`` comment fixes the dimensions when present; otherwise
    rows and columns are each inferred from the largest index seen.
    """
    rows, cols, values = [], [], []
    shape: tuple[int, int] | None = None
    with open(path) as handle:
        for number, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                shape = _shape_comment(stripped, number) or shape
                continue
            fields = stripped.split()
            if len(fields) != 3:
                raise ProblemError(f"expected 'row col value', got {stripped!r}", number)
            try:
                rows.append(int(fields[0]))
                cols.append(int(fields[1]))
                values.append(float(fields[2]))
            except ValueError as e:
                raise ProblemError(f"malformed triplet {stripped!r}", number) from e
    if not rows:
        raise ProblemError(f"matrix file {path} contains no entries")
    inferred = (max(rows) + 1, max(cols) + 1)
    if shape is None:
        shape = inferred
    elif inferred[0] > shape[0] or inferred[1] > shape[1]:
        raise ProblemError(
            f"entry index {inferred[0] - 1},{inferred[1] - 1} outside declared shape "
            f"{shape[0]}×{shape[1]}"
        )
    return SparseMatrix.from_coo(np.array(rows), np.array(cols), np.array(values), shape)
