"""Tests for the coded and baseline iteration engines."""

import numpy as np
import pytest

from subdecode.codes.patterns import (
    CodeParams,
    combined_cyclic_from_supports,
    fractional_repetition_pattern,
    identity_pattern,
    replication_pattern,
)
from subdecode.core.exceptions import ConfigurationError, UnknownSchemeError
from subdecode.core.interfaces import ProblemKind, Scheme, SplitScheme
from subdecode.engines import build_engine, get_engine_class, scheme_pattern
from subdecode.engines.gradient import GradientEngine
from subdecode.engines.ortho import OrthoEngine, SvdEngine, orthonormalize
from subdecode.engines.power import (
    PowerColumnEngine,
    PowerRowEngine,
    PowerSummaEngine,
    group_survivors,
)
from subdecode.kernel.dense import qr_small, subspace_distance
from subdecode.kernel.sparse import SparseMatrix
from subdecode.problems.least_squares import build_least_squares
from subdecode.problems.pagerank import synthetic_contraction
from subdecode.problems.spectral import SpectralProblem, build_svd_problem
from subdecode.simharness.erasure import ErasureModel, draw_survivor_masks

CODED_4 = combined_cyclic_from_supports(4, [0, 1], [0, 2])
CODED_GROUP = combined_cyclic_from_supports(2, [0], [1])


def symmetric_with_spectrum(n, leading, seed=0):
    """Symmetric matrix with the given leading eigenvalues and the rest equal to 1."""
    Q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n)))
    values = np.ones(n)
    values[: len(leading)] = leading
    return (Q * values) @ Q.T, Q[:, : len(leading)]


def spectral_problem(n=12):
    M, top = symmetric_with_spectrum(n, [5.0, 4.0])
    return SpectralProblem(M=SparseMatrix.from_dense(M), r=2, reference=top)


class TestSchemePattern:
    """Test the pattern each scheme places data with."""

    def test_uncoded_is_identity(self, rng):
        pattern = scheme_pattern(Scheme.UNCODED, CodeParams(6, 3, 2), rng)
        np.testing.assert_array_equal(pattern.mask, np.eye(6, dtype=bool))

    def test_replication(self, rng):
        pattern = scheme_pattern(Scheme.REPLICATION_COMM, CodeParams(6, 3, 2), rng)
        assert pattern.k == 3

    def test_coded_needs_twice_k_workers(self, rng):
        with pytest.raises(ConfigurationError):
            scheme_pattern(Scheme.CODED, CodeParams(7, 3, 2), rng)

    def test_pattern_file(self, tmp_path, rng):
        path = tmp_path / "pattern.txt"
        CODED_4.save(path)
        pattern = scheme_pattern(Scheme.CODED, CodeParams(8, 4, 2), rng, pattern_file=path)
        np.testing.assert_array_equal(pattern.mask, CODED_4.mask)


class TestEngineSelection:
    """Test engine lookup and construction errors."""

    def test_engine_classes(self):
        assert get_engine_class(ProblemKind.PAGERANK, SplitScheme.SUMMA) is PowerSummaEngine
        assert get_engine_class(ProblemKind.EIGEN, SplitScheme.COLUMN) is OrthoEngine
        assert get_engine_class(ProblemKind.GD, SplitScheme.ROW) is GradientEngine

    def test_eigen_needs_column_split(self):
        with pytest.raises(ConfigurationError):
            get_engine_class(ProblemKind.EIGEN, SplitScheme.ROW)

    def test_gradient_coding_only_for_gd(self, small_system):
        with pytest.raises(UnknownSchemeError):
            build_engine(
                ProblemKind.PAGERANK,
                SplitScheme.ROW,
                small_system,
                Scheme.APPROX_GRADIENT_CODING,
                fractional_repetition_pattern(8, 4),
            )

    def test_summa_needs_k(self, small_system):
        with pytest.raises(ConfigurationError):
            build_engine(
                ProblemKind.PAGERANK, SplitScheme.SUMMA, small_system, Scheme.CODED, CODED_GROUP
            )


class TestPowerRow:
    """Test row-split power iteration."""

    def test_full_survivors_exact(self, small_system, rng):
        engine = PowerRowEngine(small_system, Scheme.CODED, CODED_4)
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.arange(8), rng)
        expected = small_system.B.to_dense() @ state.x + small_system.y
        np.testing.assert_allclose(nxt.x, expected, atol=1e-10)
        assert nxt.delta == 0.0
        assert nxt.t == 1

    def test_all_erased_keeps_iterate(self, small_system, rng):
        engine = PowerRowEngine(small_system, Scheme.CODED, CODED_4)
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.array([], dtype=int), rng)
        np.testing.assert_array_equal(nxt.x, state.x)
        assert nxt.delta == 1.0

    def test_coded_converges_under_erasures(self, small_system, rng):
        engine = PowerRowEngine(small_system, Scheme.CODED, CODED_4)
        state = engine.initial_state(rng)
        start = engine.error(state)
        for _ in range(60):
            state = engine.step(state, np.sort(rng.choice(8, size=5, replace=False)), rng)
        assert engine.error(state) < 1e-2 * start

    def test_replication_holds_unavailable_blocks(self, small_system, rng):
        engine = PowerRowEngine(small_system, Scheme.REPLICATION_COMM, replication_pattern(6, 2))
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.array([0, 4]), rng)
        full = small_system.B.to_dense() @ state.x + small_system.y
        np.testing.assert_allclose(nxt.x[:8], full[:8])
        np.testing.assert_array_equal(nxt.x[8:], state.x[8:])
        assert nxt.delta == pytest.approx(1 / 3)

    def test_uncoded_updates_surviving_blocks(self, small_system, rng):
        engine = PowerRowEngine(small_system, Scheme.UNCODED, identity_pattern(4))
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.array([1, 3]), rng)
        full = small_system.B.to_dense() @ state.x + small_system.y
        np.testing.assert_allclose(nxt.x[3:6], full[3:6])
        np.testing.assert_array_equal(nxt.x[:3], state.x[:3])
        assert nxt.delta == 0.5

    def test_padding_does_not_leak(self, rng):
        system = synthetic_contraction(10, 0.8, np.random.default_rng(3))
        pattern = combined_cyclic_from_supports(3, [0, 1], [0, 2])
        engine = PowerRowEngine(system, Scheme.CODED, pattern)
        state = engine.initial_state(rng)
        for _ in range(5):
            state = engine.step(state, np.arange(6), rng)
        assert len(state.x) == 12
        np.testing.assert_allclose(state.x[10:], 0.0, atol=1e-12)


class TestBaselineAvailability:
    """Test block availability under replication."""

    def test_two_copies_of_two_blocks(self, rng):
        pattern = replication_pattern(4, 2)
        masks = draw_survivor_masks(4, ErasureModel(epsilon=0.5), 20_000, rng)
        available = np.array([pattern.available_blocks(np.flatnonzero(m)) for m in masks])
        assert abs(available[:, 0].mean() - 5 / 6) < 0.01

    def test_all_survive_matches_noiseless(self, small_system, rng):
        replicated = PowerRowEngine(small_system, Scheme.REPLICATION_COMM, replication_pattern(8, 2))
        noiseless = PowerRowEngine(small_system, Scheme.NOISELESS, identity_pattern(4))
        state = noiseless.initial_state(rng)
        np.testing.assert_allclose(
            replicated.step(state, np.arange(8), rng).x,
            noiseless.step(state, np.arange(4), rng).x,
        )


class TestPowerColumn:
    """Test column-split power iteration."""

    def test_full_survivors_exact(self, small_system, rng):
        engine = PowerColumnEngine(small_system, Scheme.CODED, CODED_4)
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.arange(8), rng)
        expected = small_system.B.to_dense() @ state.x + small_system.y
        np.testing.assert_allclose(nxt.x, expected, atol=1e-10)

    def test_weighted_sum_matches_cache(self, small_system, rng):
        engine = PowerColumnEngine(small_system, Scheme.CODED, CODED_4)
        state = engine.initial_state(rng)
        for _ in range(4):
            state = engine.step(state, np.sort(rng.choice(8, size=3, replace=False)), rng)
            np.testing.assert_allclose(
                state.x, state.u_hat.sum(axis=0) + small_system.y, atol=1e-10
            )

    def test_all_erased_reuses_cache(self, small_system, rng):
        engine = PowerColumnEngine(small_system, Scheme.CODED, CODED_4)
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.array([], dtype=int), rng)
        np.testing.assert_allclose(nxt.x, small_system.y)


class TestPowerSumma:
    """Test SUMMA-split power iteration."""

    def test_group_survivors(self):
        assert group_survivors([0, 3, 4, 6], 1, 4) == [0, 2]

    def test_full_survivors_exact(self, small_system, rng):
        engine = PowerSummaEngine(small_system, Scheme.CODED, CODED_GROUP, k=4)
        assert engine.n_workers == 8
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.arange(8), rng)
        expected = small_system.B.to_dense() @ state.x + small_system.y
        np.testing.assert_allclose(nxt.x, expected, atol=1e-10)

    def test_erased_group_keeps_its_strip_cache(self, small_system, rng):
        engine = PowerSummaEngine(small_system, Scheme.CODED, CODED_GROUP, k=4)
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.arange(4, 8), rng)
        B = small_system.B.to_dense()
        expected = B[:, 6:] @ state.x[6:] + small_system.y
        np.testing.assert_allclose(nxt.x, expected, atol=1e-10)
        np.testing.assert_array_equal(nxt.w_hat[0], 0.0)

    def test_uncoded_per_group(self, small_system, rng):
        engine = PowerSummaEngine(small_system, Scheme.UNCODED, identity_pattern(2), k=4)
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.arange(4), rng)
        expected = small_system.B.to_dense() @ state.x + small_system.y
        np.testing.assert_allclose(nxt.x, expected, atol=1e-12)


class TestOrtho:
    """Test coded orthogonal iteration."""

    def setup_method(self):
        self.problem = spectral_problem()

    def test_full_survivors_is_plain_qr_step(self, rng):
        engine = OrthoEngine(self.problem, Scheme.CODED, CODED_4)
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.arange(8), rng)
        expected, _ = qr_small(self.problem.M.to_dense() @ state.X)
        np.testing.assert_allclose(nxt.X, expected, atol=1e-8)

    def test_acceleration_spans_same_subspace(self):
        plain = OrthoEngine(self.problem, Scheme.CODED, CODED_4)
        fast = OrthoEngine(self.problem, Scheme.CODED, CODED_4, accelerate=True)
        state = plain.initial_state(np.random.default_rng(0))
        survivors = np.array([0, 2, 3, 5, 6])
        X_plain = plain.step(state, survivors, np.random.default_rng(1)).X
        X_fast = fast.step(state, survivors, np.random.default_rng(1)).X
        assert subspace_distance(X_plain, X_fast) < 1e-6

    def test_noiseless_converges(self, rng):
        engine = OrthoEngine(self.problem, Scheme.NOISELESS, identity_pattern(4))
        state = engine.initial_state(rng)
        for _ in range(40):
            state = engine.step(state, np.arange(4), rng)
        assert engine.error(state) < 1e-6

    def test_degenerate_input_restarts(self, rng):
        Z = np.zeros((6, 2))
        Z[0, 0] = 1.0
        X, _, restarted = orthonormalize(Z, False, rng)
        assert restarted
        np.testing.assert_allclose(X.T @ X, np.eye(2), atol=1e-10)
        assert abs(X[0, 0]) == pytest.approx(1.0)


class TestSvd:
    """Test coded truncated SVD."""

    def test_noiseless_converges(self, rng):
        gen = np.random.default_rng(4)
        U, _ = np.linalg.qr(gen.standard_normal((16, 8)))
        V, _ = np.linalg.qr(gen.standard_normal((8, 8)))
        data = (U * np.array([5.0, 4.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5])) @ V.T
        problem = build_svd_problem(SparseMatrix.from_dense(data), 2)
        engine = SvdEngine(problem, Scheme.NOISELESS, identity_pattern(4))
        state = engine.initial_state(rng)
        for _ in range(30):
            state = engine.step(state, np.arange(4), rng)
        assert engine.error(state) < 1e-6
        assert subspace_distance(problem.reference, V[:, :2]) < 1e-6


class TestGradient:
    """Test coded gradient descent."""

    def setup_method(self):
        self.problem = build_least_squares(40, 5, np.random.default_rng(8))

    def block_gradients(self):
        return [
            self.problem.A_data[s].T @ (-self.problem.y_obs[s]) / 40
            for s in (slice(0, 10), slice(10, 20), slice(20, 30), slice(30, 40))
        ]

    def test_full_survivors_exact_step(self, rng):
        engine = GradientEngine(self.problem, Scheme.CODED, CODED_4)
        state = engine.initial_state(rng)
        nxt = engine.step(state, np.arange(8), rng)
        expected = -engine.step_size * self.problem.gradient(np.zeros(5))
        np.testing.assert_allclose(nxt.x, expected, atol=1e-10)

    def test_uncoded_drops_missing_gradients(self, rng):
        engine = GradientEngine(self.problem, Scheme.UNCODED, identity_pattern(4))
        nxt = engine.step(engine.initial_state(rng), np.array([1, 3]), rng)
        g = self.block_gradients()
        np.testing.assert_allclose(nxt.x, -engine.step_size * (g[1] + g[3]), atol=1e-12)
        assert nxt.delta == 0.5

    def test_fractional_repetition_counts_group_once(self, rng):
        engine = GradientEngine(
            self.problem, Scheme.APPROX_GRADIENT_CODING, fractional_repetition_pattern(8, 4)
        )
        nxt = engine.step(engine.initial_state(rng), np.array([0, 1]), rng)
        g = self.block_gradients()
        # one of two pairs recovered, scaled up to both
        np.testing.assert_allclose(nxt.x, -engine.step_size * 2 * (g[0] + g[1]), atol=1e-12)
        assert nxt.delta == 0.5

    def test_fractional_repetition_all_pairs_is_full_gradient(self, rng):
        engine = GradientEngine(
            self.problem, Scheme.APPROX_GRADIENT_CODING, fractional_repetition_pattern(8, 4)
        )
        nxt = engine.step(engine.initial_state(rng), np.array([0, 3, 5]), rng)
        expected = -engine.step_size * self.problem.gradient(np.zeros(5))
        np.testing.assert_allclose(nxt.x, expected, atol=1e-10)
        assert nxt.delta == 0.0

    def test_fractional_repetition_averages_recovered_pairs(self, rng):
        problem = build_least_squares(60, 5, np.random.default_rng(9))
        engine = GradientEngine(
            problem, Scheme.APPROX_GRADIENT_CODING, fractional_repetition_pattern(6, 6)
        )
        # workers 0 and 2 hold pairs {0, 1} and {2, 3}; pair {4, 5} is lost
        nxt = engine.step(engine.initial_state(rng), np.array([0, 2]), rng)
        g = [problem.A_data[s].T @ (-problem.y_obs[s]) / 60 for s in (slice(0, 20), slice(20, 40))]
        mean_of_pairs = (g[0] + g[1]) / 2
        np.testing.assert_allclose(nxt.x, -engine.step_size * 3 * mean_of_pairs, atol=1e-12)
        assert nxt.delta == pytest.approx(1 / 3)

    def test_noiseless_reaches_minimizer(self, rng):
        engine = GradientEngine(self.problem, Scheme.NOISELESS, identity_pattern(4), step_size=1.0)
        state = engine.initial_state(rng)
        for _ in range(300):
            state = engine.step(state, np.arange(4), rng)
        np.testing.assert_allclose(state.x, self.problem.x_star, atol=1e-6)

    def test_step_size_validated(self):
        with pytest.raises(ConfigurationError):
            GradientEngine(self.problem, Scheme.CODED, CODED_4, step_size=0.0)
