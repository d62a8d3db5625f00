"""Tests for reshaping operators, split plans and worker storage."""

import numpy as np
import pytest

from subdecode.codes.patterns import (
    CodeParams,
    SparsityPattern,
    combined_cyclic_from_supports,
    replication_pattern,
)
from subdecode.core.exceptions import ConfigurationError, DimensionError
from subdecode.core.interfaces import SplitScheme
from subdecode.kernel.sparse import SparseMatrix
from subdecode.splitting import (
    assign_storage,
    assign_summa_storage,
    kron_apply,
    mat,
    pad_square,
    pad_vector,
    plan_split,
    split_blocks,
    stored_nnz,
    vec,
)

EXAMPLE_PATTERN = SparsityPattern(CodeParams(3, 2, 2), np.array([[1, 0], [0, 1], [1, 1]]))


class TestReshape:
    """Test vec, mat and the implicit Kronecker product."""

    def test_vec(self):
        np.testing.assert_array_equal(vec(np.array([[1, 2], [3, 4]])), [1, 2, 3, 4])

    def test_mat(self):
        np.testing.assert_array_equal(mat(np.array([1, 2, 3, 4]), 2), [[1, 2], [3, 4]])

    def test_mat_single_row(self):
        assert mat(np.arange(5.0), 5).shape == (1, 5)

    def test_mat_indivisible(self):
        with pytest.raises(DimensionError):
            mat(np.arange(5.0), 2)

    def test_mat_inverts_vec(self, rng):
        X = rng.standard_normal((4, 3))
        np.testing.assert_array_equal(mat(vec(X), 3), X)

    def test_kron_identity(self, rng):
        v = rng.standard_normal(6)
        np.testing.assert_array_equal(kron_apply(np.eye(3), v, 2), v)

    def test_kron_two_blocks_and_their_sum(self):
        A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        v1, v2 = np.array([1.0, 2.0]), np.array([10.0, 20.0])
        result = kron_apply(A, np.concatenate([v1, v2]), 2)
        np.testing.assert_array_equal(result, np.concatenate([v1, v2, v1 + v2]))

    def test_kron_matches_explicit_product(self, rng):
        A = rng.standard_normal((5, 3))
        v = rng.standard_normal(12)
        explicit = np.kron(A, np.eye(4)) @ v
        assert np.max(np.abs(kron_apply(A, v, 4) - explicit)) < 1e-12

    def test_kron_length_mismatch(self):
        with pytest.raises(DimensionError):
            kron_apply(np.eye(2), np.ones(5), 2)


class TestPlanSplit:
    """Test block sizing."""

    def test_ceiling_padding(self):
        plan = plan_split(10, SplitScheme.ROW, 3)
        assert plan.block_size == 4
        assert plan.pad == 2
        assert plan.padded == 12
        assert plan.block_slice(2) == slice(8, 12)

    def test_exact_division(self):
        plan = plan_split(12, SplitScheme.COLUMN, 4)
        assert plan.pad == 0
        assert plan.side == 4

    def test_summa_sizes(self):
        plan = plan_split(10, SplitScheme.SUMMA, 4, P=8)
        assert plan.side == 2
        assert plan.row_pieces == 2
        assert plan.padded == 10
        assert plan.block_size == 5
        assert plan.row_block == 5

    def test_summa_extra_row_pieces(self):
        plan = plan_split(10, SplitScheme.SUMMA, 4, row_pieces=3)
        assert plan.padded == 12
        assert plan.block_size == 6
        assert plan.row_block == 4

    def test_summa_needs_square_k(self):
        with pytest.raises(ConfigurationError):
            plan_split(10, SplitScheme.SUMMA, 5)

    def test_summa_group_size(self):
        with pytest.raises(ConfigurationError):
            plan_split(10, SplitScheme.SUMMA, 4, P=3)

    def test_non_positive_dimension(self):
        with pytest.raises(ConfigurationError):
            plan_split(0, SplitScheme.ROW, 2)


class TestStorage:
    """Test block cutting and assignment to workers."""

    def setup_method(self):
        gen = np.random.default_rng(21)
        dense = gen.standard_normal((10, 10)) * (gen.random((10, 10)) < 0.5)
        self.dense = dense
        self.B = SparseMatrix.from_dense(dense)

    def test_padding_is_zero(self):
        plan = plan_split(10, SplitScheme.ROW, 3)
        padded = pad_square(self.B, plan).to_dense()
        assert padded.shape == (12, 12)
        np.testing.assert_array_equal(padded[:10, :10], self.dense)
        assert not padded[10:].any() and not padded[:, 10:].any()
        np.testing.assert_array_equal(pad_vector(np.ones(10), 12)[10:], 0.0)

    def test_row_blocks_stack_back(self):
        plan = plan_split(10, SplitScheme.ROW, 3)
        blocks = split_blocks(pad_square(self.B, plan), plan)
        assert len(blocks) == 3
        np.testing.assert_array_equal(
            np.vstack([b.to_dense() for b in blocks])[:10, :10], self.dense
        )

    def test_column_blocks(self):
        plan = plan_split(10, SplitScheme.COLUMN, 2)
        blocks = split_blocks(pad_square(self.B, plan), plan)
        np.testing.assert_array_equal(blocks[1].to_dense(), self.dense[:, 5:])

    def test_example_assignment(self):
        plan = plan_split(10, SplitScheme.ROW, 2)
        blocks = split_blocks(pad_square(self.B, plan), plan)
        y = np.arange(10.0)
        stores = assign_storage(blocks, EXAMPLE_PATTERN, [y[:5], y[5:]])
        assert [s.block_indices for s in stores] == [[0], [1], [0, 1]]
        np.testing.assert_array_equal(stores[2].y_part(1), y[5:])

    def test_stores_are_independent_copies(self):
        plan = plan_split(10, SplitScheme.ROW, 2)
        blocks = split_blocks(pad_square(self.B, plan), plan)
        stores = assign_storage(blocks, EXAMPLE_PATTERN)
        assert stores[0].blocks[0][1] is not blocks[0]
        shared = assign_storage(blocks, EXAMPLE_PATTERN, shared=True)
        assert shared[0].blocks[0][1] is blocks[0]

    def test_block_count_mismatch(self):
        with pytest.raises(DimensionError):
            assign_storage([self.B], EXAMPLE_PATTERN)

    def test_combined_cyclic_storage_cost(self):
        pattern = combined_cyclic_from_supports(5, [0, 2], [1, 3])
        plan = plan_split(10, SplitScheme.ROW, 5)
        stores = assign_storage(split_blocks(pad_square(self.B, plan), plan), pattern)
        assert stored_nnz(stores) == 2 * 2 * self.B.nnz

    def test_summa_groups_hold_their_strip(self):
        plan = plan_split(10, SplitScheme.SUMMA, 4, P=8)
        groups = assign_summa_storage(self.B, plan, replication_pattern(4, 2))
        assert len(groups) == 2
        worker = groups[1][1]
        assert worker.worker_id == 5
        assert worker.group == 1
        assert worker.block_indices == [1]
        np.testing.assert_array_equal(worker.blocks[0][1].to_dense(), self.dense[5:, 5:])
