"""The ``gen`` command: write synthetic graphs and matrices."""

import logging
from pathlib import Path

import click
import numpy as np
import scipy.sparse as sp
import yaml

from subdecode.core.config import GenConfig
from subdecode.core.exceptions import SubdecodeError
from subdecode.kernel.sparse import SparseMatrix
from subdecode.problems.edgelist import write_edge_list, write_triplets
from subdecode.problems.generators import (
    gen_er,
    gen_planted_with_members,
    gen_sbm,
    planted_block_members,
)
from subdecode.simharness.seeding import Stream, run_stream

from .exceptions import ConfigError, OutputError
from .utils import ensure_directory, info, load_config_manager, success, write_text

logger = logging.getLogger(__name__)


def _upper_edges(adjacency: SparseMatrix) -> SparseMatrix:
    """One entry per undirected edge."""
    return SparseMatrix.from_scipy(sp.triu(adjacency.csr, k=1))


def _labels_text(labels: np.ndarray) -> str:
    return "".join(f"{node} {int(label)}\n" for node, label in enumerate(labels))


def generate(cfg: GenConfig, directory: Path) -> list[Path]:
    """
    Write the configured synthetic input plus a metadata sidecar.

    Graphs are written as undirected edge lists (one line per edge),
    planted matrices as ``row col value`` triplets. Labels and block
    memberships go to a ``<name>.labels`` file.

    Returns:
        Paths of the written files
    """
    rng = run_stream(cfg.seed, 0, Stream.PROBLEM)
    stem = directory / cfg.generator
    header = f"generator={cfg.generator} n_nodes={cfg.n_nodes} seed={cfg.seed}"
    written: list[Path] = []

    try:
        if cfg.generator == "er":
            adjacency = gen_er(cfg.n_nodes, cfg.edge_prob, rng)
            data_path = stem.with_suffix(".edges")
            write_edge_list(_upper_edges(adjacency), data_path, header)
            written.append(data_path)
        elif cfg.generator == "sbm":
            adjacency, labels = gen_sbm(cfg.n_nodes, cfg.p_in, cfg.p_out, rng)
            data_path = stem.with_suffix(".edges")
            write_edge_list(_upper_edges(adjacency), data_path, header)
            written += [data_path, write_text(stem.with_suffix(".labels"), _labels_text(labels))]
        else:
            blocks = [(cfg.block_size, cfg.block_prob)] * cfg.planted_blocks
            planted = gen_planted_with_members(cfg.n_nodes, cfg.background_prob, blocks, rng)
            data_path = stem.with_suffix(".triplets")
            write_triplets(planted.matrix, data_path, header)
            members = planted_block_members(planted)
            written += [data_path, write_text(stem.with_suffix(".labels"), _labels_text(members))]
    except OSError as e:
        raise OutputError(str(stem), str(e)) from e

    metadata = {
        "generator": cfg.generator,
        "seed": cfg.seed,
        "n_nodes": cfg.n_nodes,
        "files": [path.name for path in written],
    }
    if cfg.generator == "er":
        metadata["edge_prob"] = cfg.edge_prob
    elif cfg.generator == "sbm":
        metadata.update(p_in=cfg.p_in, p_out=cfg.p_out)
    else:
        metadata.update(
            background_prob=cfg.background_prob,
            planted_blocks=cfg.planted_blocks,
            block_size=cfg.block_size,
            block_prob=cfg.block_prob,
        )
    written.append(
        write_text(stem.with_suffix(".meta.yaml"), yaml.safe_dump(metadata, sort_keys=True))
    )
    logger.info(f"generated {cfg.generator} input with seed {cfg.seed}")
    return written


@click.command()
@click.argument("generator", type=click.Choice(["er", "sbm", "planted"]), required=False)
@click.option("--config", "config_path", type=click.Path(), help="Flat key = value config file")
@click.option("--seed", type=int, help="Master seed")
@click.option("--out", "out_dir", default="data", show_default=True, help="Output directory")
@click.option("-n", "--nodes", type=int, help="Number of nodes")
@click.option("-p", "--edge-prob", type=float, help="ER edge probability")
@click.option("--p-in", type=float, help="SBM within-community probability")
@click.option("--p-out", type=float, help="SBM cross-community probability")
def gen(
    generator: str | None,
    config_path: str | None,
    seed: int | None,
    out_dir: str,
    nodes: int | None,
    edge_prob: float | None,
    p_in: float | None,
    p_out: float | None,
):
    """Generate an er, sbm or planted input with a seed sidecar file."""
    overrides = {
        "generator": generator,
        "seed": seed,
        "n_nodes": nodes,
        "edge_prob": edge_prob,
        "p_in": p_in,
        "p_out": p_out,
    }
    manager = load_config_manager(config_path, None, overrides)
    try:
        cfg = manager.get_gen_config()
        written = generate(cfg, ensure_directory(out_dir))
    except SubdecodeError as e:
        raise ConfigError.from_library(e, config_path) from e

    for path in written:
        info(f"wrote {path}")
    success(f"Generated {cfg.generator} input (seed {cfg.seed})")
