import numpy as np
import pytest

from l0rcd import (
    LeastSquaresObjective,
    LogisticL2Objective,
    finite_difference_error,
    load_labels_csv,
    load_matrix_csv,
    load_vector_csv,
)


def random_ls(m, n, seed):
    rng = np.random.default_rng(seed)
    return LeastSquaresObjective(
        rng.uniform(-1, 1, (m, n)), rng.uniform(-1, 1, m)
    )


def random_logistic(m, n, seed, nu=0.3):
    rng = np.random.default_rng(seed)
    return LogisticL2Objective(
        rng.uniform(-1, 1, (m, n)), (rng.random(m) < 0.5).astype(float), nu
    )


class TestLeastSquares:
    def test_eval_identity_matrix(self):
        """Residual at b is zero; at the origin it is b itself."""
        f = LeastSquaresObjective(np.eye(2), np.array([1.0, 1.0]))
        assert f.eval(np.array([1.0, 1.0])) == pytest.approx(0.0)
        assert f.eval(np.zeros(2)) == pytest.approx(1.0)

    def test_block_grad_matches_full(self):
        f = LeastSquaresObjective(np.eye(2), np.array([1.0, 1.0]))
        cache = f.make_cache(np.zeros(2))
        g0 = f.block_grad(np.zeros(2), slice(0, 1), cache)
        np.testing.assert_allclose(g0, [-1.0])

    def test_single_column_gradient(self):
        f = LeastSquaresObjective(np.array([[1.0], [2.0]]), np.zeros(2))
        x = np.array([1.0])
        np.testing.assert_allclose(f.full_grad(x), [5.0])
        assert f.eval(x) == pytest.approx(2.5)

    def test_column_lipschitz(self):
        f = LeastSquaresObjective(np.array([[1.0], [2.0]]), np.zeros(2))
        np.testing.assert_allclose(f.column_lipschitz(), [5.0])

    def test_spectral_lipschitz_identity(self):
        f = LeastSquaresObjective(np.eye(3), np.zeros(3))
        assert f.spectral_lipschitz() == pytest.approx(1.0)

    def test_block_lipschitz_spectral_norm(self):
        f = LeastSquaresObjective(np.eye(4), np.zeros(4))
        np.testing.assert_allclose(f.block_lipschitz((2, 2)), [1.0, 1.0])

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            LeastSquaresObjective(np.eye(2), np.zeros(3))
        with pytest.raises(ValueError):
            LeastSquaresObjective(np.zeros(4), np.zeros(4))

    def test_nonfinite_rejected(self):
        f = LeastSquaresObjective(np.eye(2), np.zeros(2))
        with np.errstate(over="ignore"), pytest.raises(ValueError):
            f.eval(np.array([1e200, 0.0]))


class TestLogistic:
    def test_eval_at_origin(self):
        """With all-zero labels, x = 0 gives the mean of log(2)."""
        f = LogisticL2Objective(np.ones((4, 2)), np.zeros(4), nu=0.1)
        assert f.eval(np.zeros(2)) == pytest.approx(np.log(2.0))

    def test_grad_at_origin(self):
        rng = np.random.default_rng(11)
        data = rng.uniform(-1, 1, (6, 3))
        y = np.array([1.0, 0.0, 1.0, 1.0, 0.0, 0.0])
        f = LogisticL2Objective(data, y, nu=0.2)
        expected = data.T @ (0.5 - y) / 6.0
        np.testing.assert_allclose(f.full_grad(np.zeros(3)), expected)

    def test_overflow_safe(self):
        # predictors of +-2000 must not produce inf/nan
        data = np.array([[1.0], [-1.0]])
        f = LogisticL2Objective(data, np.array([1.0, 0.0]), nu=1e-3)
        v = f.eval(np.array([2000.0]))
        assert np.isfinite(v)
        assert np.isfinite(f.full_grad(np.array([2000.0]))).all()

    def test_column_lipschitz_formula(self):
        data = np.array([[1.0, 2.0], [3.0, 0.0]])
        f = LogisticL2Objective(data, np.zeros(2), nu=0.5)
        np.testing.assert_allclose(
            f.column_lipschitz(), [10.0 / 8.0 + 0.5, 4.0 / 8.0 + 0.5]
        )

    def test_label_validation(self):
        with pytest.raises(ValueError):
            LogisticL2Objective(np.ones((2, 1)), np.array([0.0, 2.0]), nu=0.1)

    def test_nu_validation(self):
        with pytest.raises(ValueError):
            LogisticL2Objective(np.ones((2, 1)), np.zeros(2), nu=0.0)


@pytest.mark.parametrize("make", [lambda s: random_ls(8, 5, s), lambda s: random_logistic(8, 5, s)])
class TestOracleContract:
    """Properties every smooth oracle must satisfy, checked on random points."""

    def test_finite_difference_gradient(self, make):
        oracle = make(0)
        rng = np.random.default_rng(1)
        for _ in range(5):
            x = rng.standard_normal(oracle.dim)
            err, _ = finite_difference_error(oracle, x)
            assert err <= 1e-5

    def test_block_grad_matches_full_grad(self, make):
        oracle = make(2)
        rng = np.random.default_rng(3)
        x = rng.standard_normal(oracle.dim)
        cache = oracle.make_cache(x)
        g = oracle.full_grad(x)
        for start in range(0, oracle.dim, 2):
            sl = slice(start, min(start + 2, oracle.dim))
            np.testing.assert_allclose(
                oracle.block_grad(x, sl, cache), g[sl], atol=1e-12
            )

    def test_value_from_cache(self, make):
        oracle = make(4)
        rng = np.random.default_rng(5)
        x = rng.standard_normal(oracle.dim)
        cache = oracle.make_cache(x)
        assert oracle.value_from_cache(x, cache) == pytest.approx(
            oracle.eval(x), rel=1e-12
        )

    def test_shifted_evaluations(self, make):
        """value/grad/curvature at x + h e_j agree with fresh evaluations."""
        oracle = make(6)
        rng = np.random.default_rng(7)
        x = rng.standard_normal(oracle.dim)
        cache = oracle.make_cache(x)
        for _ in range(20):
            j = int(rng.integers(oracle.dim))
            h = float(rng.standard_normal())
            shifted = x.copy()
            shifted[j] += h
            assert oracle.value_shifted(x, j, h, cache) == pytest.approx(
                oracle.eval(shifted), rel=1e-10, abs=1e-12
            )
            assert oracle.coord_grad_shifted(x, j, h, cache) == pytest.approx(
                float(oracle.full_grad(shifted)[j]), rel=1e-9, abs=1e-10
            )
            # curvature via centered difference of the coordinate gradient
            eps = 1e-6
            fd = (
                oracle.coord_grad_shifted(x, j, h + eps, cache)
                - oracle.coord_grad_shifted(x, j, h - eps, cache)
            ) / (2 * eps)
            assert oracle.coord_curvature_shifted(x, j, h, cache) == pytest.approx(
                fd, rel=1e-4, abs=1e-6
            )

    def test_cache_coherence_after_many_updates(self, make):
        """1000 incremental block updates drift less than 1e-8 from a rebuild."""
        oracle = make(8)
        rng = np.random.default_rng(9)
        x = rng.standard_normal(oracle.dim)
        cache = oracle.make_cache(x)
        for _ in range(1000):
            start = int(rng.integers(oracle.dim))
            sl = slice(start, min(start + 2, oracle.dim))
            old = x[sl].copy()
            x[sl] = rng.standard_normal(sl.stop - sl.start) * (rng.random() < 0.7)
            cache = oracle.update_cache(cache, sl, old, x[sl])
        fresh = oracle.make_cache(x)
        drift = np.max(np.abs(cache - fresh)) / (1.0 + np.max(np.abs(fresh)))
        assert drift <= 1e-8

    def test_update_cache_noop_when_unchanged(self, make):
        oracle = make(10)
        x = np.ones(oracle.dim)
        cache = oracle.make_cache(x)
        before = cache.copy()
        oracle.update_cache(cache, slice(0, 2), x[0:2].copy(), x[0:2].copy())
        np.testing.assert_array_equal(cache, before)

    def test_blockwise_lipschitz_bound(self, make):
        """Sampled gradient differences never exceed the advertised constants."""
        oracle = make(12)
        rng = np.random.default_rng(13)
        L = oracle.column_lipschitz()
        for _ in range(300):
            x = rng.standard_normal(oracle.dim)
            j = int(rng.integers(oracle.dim))
            h = float(rng.standard_normal())
            if h == 0.0:
                continue
            shifted = x.copy()
            shifted[j] += h
            diff = abs(oracle.full_grad(shifted)[j] - oracle.full_grad(x)[j])
            assert diff <= L[j] * abs(h) * (1 + 1e-9) + 1e-12


class TestLoaders:
    def test_matrix_roundtrip(self, tmp_path):
        A = np.array([[1.5, -2.0], [0.25, 3.0], [0.0, 1.0]])
        path = tmp_path / "A.csv"
        np.savetxt(path, A, delimiter=",")
        np.testing.assert_allclose(load_matrix_csv(path), A)

    def test_single_row_matrix(self, tmp_path):
        path = tmp_path / "row.csv"
        path.write_text("1.0,2.0,3.0\n")
        assert load_matrix_csv(path).shape == (1, 3)

    def test_vector_roundtrip(self, tmp_path):
        b = np.array([0.5, -1.0, 2.0])
        path = tmp_path / "b.csv"
        np.savetxt(path, b, delimiter=",")
        np.testing.assert_allclose(load_vector_csv(path), b)

    def test_labels_validated(self, tmp_path):
        path = tmp_path / "y.csv"
        np.savetxt(path, np.array([0.0, 1.0, 0.5]), delimiter=",")
        with pytest.raises(ValueError):
            load_labels_csv(path)
