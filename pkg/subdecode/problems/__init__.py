"""Problem constructors and data generators."""

from subdecode.problems.edgelist import (
    load_edge_list,
    load_triplets,
    write_edge_list,
    write_triplets,
)
from subdecode.problems.generators import (
    PlantedMatrix,
    gen_er,
    gen_planted,
    gen_planted_with_members,
    gen_sbm,
    planted_block_members,
)
from subdecode.problems.least_squares import (
    LeastSquaresProblem,
    build_least_squares,
    subset_gradient,
)
from subdecode.problems.pagerank import (
    DanglingMode,
    LinearSystem,
    PageRankProblem,
    build_pagerank,
    normalize_columns,
    synthetic_contraction,
)
from subdecode.problems.spectral import (
    IsolateMode,
    SpectralProblem,
    SvdProblem,
    build_shifted_laplacian,
    build_svd_problem,
    cluster_labels,
    clustering_accuracy,
)

__all__ = [
    "DanglingMode",
    "IsolateMode",
    "LeastSquaresProblem",
    "LinearSystem",
    "PageRankProblem",
    "PlantedMatrix",
    "SpectralProblem",
    "SvdProblem",
    "build_least_squares",
    "build_pagerank",
    "build_shifted_laplacian",
    "build_svd_problem",
    "cluster_labels",
    "clustering_accuracy",
    "gen_er",
    "gen_planted",
    "gen_planted_with_members",
    "gen_sbm",
    "load_edge_list",
    "load_triplets",
    "normalize_columns",
    "planted_block_members",
    "subset_gradient",
    "synthetic_contraction",
    "write_edge_list",
    "write_triplets",
]
