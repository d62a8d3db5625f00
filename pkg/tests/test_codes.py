"""Tests for sparsity patterns, generators, decoding and δ estimation."""

import numpy as np
import pytest

from subdecode.codes import (
    CodeParams,
    PatternKind,
    SparsityPattern,
    combined_cyclic_from_supports,
    decode_basis,
    estimate_delta,
    exact_delta_small,
    fixed_generator,
    fractional_repetition_pattern,
    identity_pattern,
    make_combined_cyclic,
    make_random_regular,
    replication_pattern,
    restrict,
    sample_generator,
    sample_projectors,
)
from subdecode.core.exceptions import (
    CombinatorialLimitError,
    ConfigurationError,
    DimensionError,
    PatternError,
)
from subdecode.simharness.erasure import ErasureModel


class TestCodeParams:
    """Test code parameter validation."""

    def test_rate(self):
        assert CodeParams(20, 10, 2).rate == 0.5

    def test_degree_above_k(self):
        with pytest.raises(PatternError):
            CodeParams(4, 2, 3)

    def test_non_positive_sizes(self):
        with pytest.raises(PatternError):
            CodeParams(0, 2, 1)


class TestCombinedCyclic:
    """Test combined-cyclic pattern construction."""

    def test_unit_supports(self):
        pattern = combined_cyclic_from_supports(3, [0], [1])
        expected = np.array(
            [[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 1, 0], [0, 0, 1], [1, 0, 0]],
            dtype=bool,
        )
        np.testing.assert_array_equal(pattern.mask, expected)
        assert pattern.kind is PatternKind.COMBINED_CYCLIC
        assert not pattern.distinct_waived

    def test_degrees(self, rng):
        pattern = make_combined_cyclic(10, 3, rng)
        assert pattern.P == 20
        assert pattern.k == 10
        assert np.all(pattern.row_degrees() == 3)
        assert np.all(pattern.mask[:10].sum(axis=0) == 3)
        assert np.all(pattern.mask[10:].sum(axis=0) == 3)

    def test_supports_differ(self, rng):
        for _ in range(20):
            pattern = make_combined_cyclic(5, 2, rng)
            assert not np.array_equal(pattern.mask[0], pattern.mask[5])

    def test_full_degree_waives_distinctness(self, rng):
        pattern = make_combined_cyclic(2, 2, rng)
        assert pattern.distinct_waived
        assert pattern.mask.all()

    def test_same_stream_same_pattern(self):
        first = make_combined_cyclic(10, 2, np.random.default_rng(3))
        second = make_combined_cyclic(10, 2, np.random.default_rng(3))
        np.testing.assert_array_equal(first.mask, second.mask)

    def test_invalid_degree(self, rng):
        with pytest.raises(PatternError):
            make_combined_cyclic(4, 5, rng)

    def test_repeated_support_index(self):
        with pytest.raises(PatternError):
            combined_cyclic_from_supports(4, [1, 1], [0, 2])

    def test_mask_is_read_only(self, pattern_20_10):
        with pytest.raises(ValueError):
            pattern_20_10.mask[0, 0] = False


class TestBaselinePatterns:
    """Test identity, replication and fractional-repetition layouts."""

    def test_identity(self):
        pattern = identity_pattern(4)
        np.testing.assert_array_equal(pattern.mask, np.eye(4, dtype=bool))

    def test_replication_holders(self):
        pattern = replication_pattern(6, 2)
        assert pattern.k == 3
        for block in range(3):
            np.testing.assert_array_equal(pattern.holders(block), [block, block + 3])

    def test_replication_indivisible(self):
        with pytest.raises(PatternError):
            replication_pattern(5, 2)

    def test_fractional_repetition(self):
        pattern = fractional_repetition_pattern(8, 4)
        np.testing.assert_array_equal(pattern.blocks_of(0), [0, 1])
        np.testing.assert_array_equal(pattern.blocks_of(3), [0, 1])
        np.testing.assert_array_equal(pattern.blocks_of(4), [2, 3])
        assert np.all(pattern.row_degrees() == 2)

    def test_fractional_repetition_odd_k(self):
        with pytest.raises(PatternError):
            fractional_repetition_pattern(8, 3)

    def test_random_regular_rows(self, rng):
        pattern = make_random_regular(12, 6, 2, rng)
        assert np.all(pattern.row_degrees() == 2)
        assert pattern.kind is PatternKind.RANDOM_REGULAR

    def test_available_blocks(self):
        pattern = replication_pattern(6, 2)
        np.testing.assert_array_equal(
            pattern.available_blocks(np.array([0, 4])), [True, True, False]
        )


class TestPatternText:
    """Test the one-line-per-worker text form."""

    def test_save_and_load(self, tmp_path, pattern_20_10):
        path = tmp_path / "pattern.txt"
        pattern_20_10.save(path)
        loaded = SparsityPattern.load(path)
        np.testing.assert_array_equal(loaded.mask, pattern_20_10.mask)
        assert loaded.params == pattern_20_10.params

    def test_ragged_line(self):
        with pytest.raises(PatternError, match="line 2"):
            SparsityPattern.from_text("101\n10\n")

    def test_non_binary(self):
        with pytest.raises(PatternError):
            SparsityPattern.from_text("102\n")

    def test_empty(self):
        with pytest.raises(PatternError):
            SparsityPattern.from_text("\n\n")


class TestGenerator:
    """Test generator sampling and restriction."""

    def test_support_respected(self, pattern_20_10, rng):
        G = sample_generator(pattern_20_10, t=4, rng=rng)
        assert G.t == 4
        assert np.all(G.values[~pattern_20_10.mask] == 0.0)
        assert np.all(G.values[pattern_20_10.mask] != 0.0)

    def test_same_stream_same_values(self, pattern_20_10):
        first = sample_generator(pattern_20_10, 0, np.random.default_rng(9))
        second = sample_generator(pattern_20_10, 0, np.random.default_rng(9))
        np.testing.assert_array_equal(first.values, second.values)

    def test_fixed_generator_masks_values(self):
        pattern = identity_pattern(2)
        G = fixed_generator(pattern, np.full((2, 2), 3.0))
        np.testing.assert_array_equal(G.values, 3.0 * np.eye(2))

    def test_restrict_orders_survivors(self, pattern_20_10, rng):
        G = sample_generator(pattern_20_10, 0, rng)
        Gs = restrict(G, [7, 2, 11])
        assert Gs.survivors == (2, 7, 11)
        np.testing.assert_array_equal(Gs.rows, G.values[[2, 7, 11]])
        assert len(Gs) == 3

    def test_restrict_no_survivors(self, pattern_20_10, rng):
        Gs = restrict(sample_generator(pattern_20_10, 0, rng), [])
        assert Gs.rows.shape == (0, 10)
        assert Gs.k == 10

    def test_restrict_out_of_range(self, pattern_20_10, rng):
        with pytest.raises(DimensionError):
            restrict(sample_generator(pattern_20_10, 0, rng), [20])


class TestDecodingBasis:
    """Test substitute decoding."""

    def setup_method(self):
        self.pattern = SparsityPattern(CodeParams(2, 2, 1), np.array([[1, 0], [1, 0]]))
        self.G = fixed_generator(self.pattern, np.array([[1.0, 0.0], [1.0, 0.0]]))

    def test_rank_one_basis(self):
        basis = decode_basis(restrict(self.G, [0, 1]))
        assert basis.rank == 1
        assert basis.delta == 0.5
        np.testing.assert_allclose(basis.projector(), np.diag([1.0, 0.0]), atol=1e-12)
        np.testing.assert_allclose(
            basis.projector() + basis.complement_projector(), np.eye(2), atol=1e-12
        )

    def test_substitute_mixes_decoded_and_fallback(self):
        basis = decode_basis(restrict(self.G, [0, 1]))
        uncoded = np.array([[2.0, -1.0], [5.0, 7.0]])
        coded = self.G.values @ uncoded
        fallback = np.array([[100.0, 100.0], [3.0, 4.0]])
        result = basis.substitute(coded, fallback)
        np.testing.assert_allclose(result, [[2.0, -1.0], [3.0, 4.0]], atol=1e-12)

    def test_full_rank_ignores_fallback(self, pattern_20_10, rng):
        G = sample_generator(pattern_20_10, 0, rng)
        basis = decode_basis(restrict(G, range(20)))
        assert basis.rank == 10
        uncoded = rng.standard_normal((10, 3))
        result = basis.substitute(G.values @ uncoded, np.zeros((10, 3)))
        np.testing.assert_allclose(result, uncoded, atol=1e-9)

    def test_no_survivors_returns_fallback(self, pattern_20_10, rng):
        basis = decode_basis(restrict(sample_generator(pattern_20_10, 0, rng), []))
        assert basis.rank == 0
        assert basis.delta == 1.0
        fallback = rng.standard_normal((10, 2))
        np.testing.assert_allclose(basis.substitute(np.zeros((0, 2)), fallback), fallback)

    def test_aggregation_weights_match_sum(self, pattern_20_10, rng):
        G = sample_generator(pattern_20_10, 0, rng)
        survivors = np.sort(rng.choice(20, size=8, replace=False))
        basis = decode_basis(restrict(G, survivors))
        coded = rng.standard_normal((8, 4))
        fallback = rng.standard_normal((10, 4))
        a, c = basis.aggregation_weights()
        np.testing.assert_allclose(
            basis.substitute(coded, fallback).sum(axis=0),
            a @ coded + c @ fallback,
            atol=1e-9,
        )

    def test_coded_row_mismatch(self):
        basis = decode_basis(restrict(self.G, [0, 1]))
        with pytest.raises(DimensionError):
            basis.substitute(np.zeros((3, 1)), np.zeros((2, 1)))


class TestDelta:
    """Test rank-loss estimation."""

    def test_no_erasures_full_rank(self, pattern_20_10, rng):
        samples = sample_projectors(pattern_20_10, ErasureModel.none(), 50, rng)
        assert samples.delta == 0.0
        np.testing.assert_allclose(samples.mean_projector, np.eye(10), atol=1e-9)

    def test_all_erased(self, pattern_20_10, rng):
        assert exact_delta_small(pattern_20_10, 20, 1, rng) == 1.0

    def test_monte_carlo_matches_enumeration(self, rng):
        pattern = combined_cyclic_from_supports(4, [0, 1], [0, 2])
        exact = exact_delta_small(pattern, 4, 50, rng)
        estimate = estimate_delta(pattern, ErasureModel(epsilon=0.5), 20_000, rng)
        assert abs(exact - estimate) < 0.01

    def test_enumeration_limit(self, rng):
        pattern = make_combined_cyclic(20, 2, rng)
        with pytest.raises(CombinatorialLimitError) as excinfo:
            exact_delta_small(pattern, 20, 1, rng)
        assert excinfo.value.count > 1_000_000

    def test_sample_count_validated(self, pattern_20_10, rng):
        with pytest.raises(ConfigurationError):
            sample_projectors(pattern_20_10, ErasureModel(), 0, rng)

    def test_standard_error_shrinks(self, pattern_20_10):
        few = sample_projectors(
            pattern_20_10, ErasureModel(), 100, np.random.default_rng(1), with_projector=False
        )
        many = sample_projectors(
            pattern_20_10, ErasureModel(), 10_000, np.random.default_rng(1), with_projector=False
        )
        assert many.standard_error < few.standard_error
