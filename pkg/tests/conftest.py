"""Shared fixtures."""

import numpy as np
import pytest

from subdecode.codes.patterns import combined_cyclic_from_supports
from subdecode.kernel.sparse import SparseMatrix
from subdecode.problems.pagerank import synthetic_contraction


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def pattern_20_10():
    """(20, 10) combined-cyclic pattern with d = 2."""
    return combined_cyclic_from_supports(10, [0, 3], [1, 5])


@pytest.fixture
def small_system():
    """Contraction on 12 unknowns, divisible by k = 3 and k = 4."""
    return synthetic_contraction(12, 0.8, np.random.default_rng(7))


@pytest.fixture
def random_sparse():
    def make(n_rows, n_cols, density=0.3, seed=0):
        gen = np.random.default_rng(seed)
        dense = gen.standard_normal((n_rows, n_cols)) * (gen.random((n_rows, n_cols)) < density)
        return SparseMatrix.from_dense(dense), dense

    return make
