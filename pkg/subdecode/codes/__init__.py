"""Sparse time-varying codes and substitute decoding."""

from subdecode.codes.decoding import DecodingBasis, decode_basis
from subdecode.codes.delta import (
    ProjectorSamples,
    estimate_delta,
    exact_delta_small,
    sample_projectors,
)
from subdecode.codes.generator import (
    GeneratorMatrix,
    PartialGenerator,
    fixed_generator,
    restrict,
    sample_generator,
)
from subdecode.codes.patterns import (
    CodeParams,
    PatternKind,
    SparsityPattern,
    combined_cyclic_from_supports,
    cyclic_block,
    fractional_repetition_pattern,
    identity_pattern,
    make_combined_cyclic,
    make_random_regular,
    replication_pattern,
)

__all__ = [
    "CodeParams",
    "DecodingBasis",
    "GeneratorMatrix",
    "PartialGenerator",
    "PatternKind",
    "ProjectorSamples",
    "SparsityPattern",
    "combined_cyclic_from_supports",
    "cyclic_block",
    "decode_basis",
    "estimate_delta",
    "exact_delta_small",
    "fixed_generator",
    "fractional_repetition_pattern",
    "identity_pattern",
    "make_combined_cyclic",
    "make_random_regular",
    "replication_pattern",
    "restrict",
    "sample_generator",
    "sample_projectors",
]
