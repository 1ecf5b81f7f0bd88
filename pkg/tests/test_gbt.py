import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from climrisk.errors import DataError
from climrisk.models import fit_gbt, predict_gbt


def two_clusters():
    x = np.arange(10.0)[:, None]
    y = np.r_[np.zeros(5), np.full(5, 10.0)]
    return x, y


def noisy(seed, n=58, p=4):
    r = np.random.default_rng(seed)
    X = r.normal(size=(n, p))
    return X, 3 * np.sin(X[:, 0]) + X[:, 1] ** 2 + r.normal(0, 0.3, n)


class TestHandComputed:
    def test_no_trees_predicts_mean(self):
        X, y = noisy(0)
        ens = fit_gbt(X, y, n_estimators=0)
        assert ens.trees == ()
        assert np.all(predict_gbt(ens, X) == np.mean(y))

    def test_single_stump(self):
        X, y = two_clusters()
        ens = fit_gbt(X, y, n_estimators=1, max_depth=1, learning_rate=1.0, reg_lambda=0.0)
        t = ens.trees[0]
        assert t.feature[0] == 0 and t.threshold[0] == 4.5
        np.testing.assert_array_equal(predict_gbt(ens, X), y)

    def test_stump_with_lambda(self):
        # residuals +-5 on 5 rows per side: w = -/+25 / (5 + 1)
        X, y = two_clusters()
        ens = fit_gbt(X, y, n_estimators=1, max_depth=1, learning_rate=1.0, reg_lambda=1.0)
        np.testing.assert_allclose(predict_gbt(ens, X), 5 + np.r_[np.full(5, -25 / 6), np.full(5, 25 / 6)])

    def test_shrinkage_geometric(self):
        # each stump removes a fraction lr of the residual: r_m = 5 (1 - lr)^m
        X, y = two_clusters()
        ens = fit_gbt(X, y, n_estimators=10, max_depth=1, learning_rate=0.3, reg_lambda=0.0)
        np.testing.assert_allclose(predict_gbt(ens, X)[0], 5 * 0.7 ** 10, rtol=1e-12)

    def test_gamma_blocks_weak_splits(self):
        X, y = two_clusters()
        # gain of the stump is 0.5 * (125 + 125 - 0) = 125
        assert len(fit_gbt(X, y, 1, 1, 1.0, reg_lambda=0.0, reg_gamma=124.0).trees[0].feature) == 3
        assert fit_gbt(X, y, 1, 1, 1.0, reg_lambda=0.0, reg_gamma=126.0).trees[0].n_leaves == 1

    def test_two_cluster_default_fit(self):
        X, y = two_clusters()
        pred = predict_gbt(fit_gbt(X, y), X)
        assert np.all(pred[:5] < 5) and np.all(pred[5:] > 5)
        assert np.ptp(pred[:5]) < 1e-9 and np.ptp(pred[5:]) < 1e-9


class TestProperties:
    @pytest.mark.parametrize("growth", ["levelwise", "leafwise"])
    def test_objective_non_increasing_without_gamma(self, growth):
        X, y = noisy(1)
        h = np.array(fit_gbt(X, y, 200, 3, 0.1, growth, reg_lambda=1.0).objective_history)
        assert h.size == 201
        assert np.all(np.diff(h) <= 1e-9 * h[0])

    @settings(max_examples=25)
    @given(st.integers(0, 10_000), st.integers(1, 4), st.sampled_from(["levelwise", "leafwise"]))
    def test_structure_bounds(self, seed, depth, growth):
        X, y = noisy(seed, 30, 3)
        ens = fit_gbt(X, y, 5, depth, 0.5, growth)
        for t in ens.trees:
            assert t.depth <= depth
            assert t.n_leaves <= 2 ** depth
            assert t.feature.size == 2 * t.n_leaves - 1

    @settings(max_examples=25)
    @given(st.integers(0, 10_000))
    def test_depth_one_growth_agrees(self, seed):
        X, y = noisy(seed, 25, 3)
        a = fit_gbt(X, y, 20, 1, 0.2, "levelwise")
        b = fit_gbt(X, y, 20, 1, 0.2, "leafwise")
        assert np.array_equal(predict_gbt(a, X), predict_gbt(b, X))

    def test_leafwise_can_go_deeper_on_one_side(self):
        r = np.random.default_rng(2)
        X = r.uniform(0, 1, size=(200, 2))
        y = np.where(X[:, 0] < 0.5, 0.0, np.floor(X[:, 1] * 4) * 10)
        lw = fit_gbt(X, y, 1, 2, 1.0, "leafwise", reg_lambda=0.0).trees[0]
        assert lw.n_leaves == 4
        assert lw.depth == 2

    def test_training_and_prediction_paths_match(self):
        # prediction accumulates trees in the same order as training
        X, y = noisy(3)
        ens = fit_gbt(X, y, 50, 2, 0.1)
        pred = np.full(y.size, ens.base_score)
        for t in ens.trees:
            pred += ens.learning_rate * t.predict(X)
        assert np.array_equal(pred, predict_gbt(ens, X))
        resid_loss = 0.5 * float(np.sum((y - pred) ** 2))
        lam_term = 0.5 * ens.reg_lambda * float(np.sum((ens.learning_rate * ens.trees[-1].value[
            ens.trees[-1].feature < 0]) ** 2))
        assert ens.objective_history[-1] == pytest.approx(resid_loss + lam_term, rel=1e-12)

    def test_row_permutation(self):
        X, y = noisy(4)
        perm = np.random.default_rng(0).permutation(y.size)
        a = predict_gbt(fit_gbt(X, y, 100), X)
        b = predict_gbt(fit_gbt(X[perm], y[perm], 100), X)
        np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-10)

    def test_deterministic(self):
        X, y = noisy(5)
        a = fit_gbt(X, y, 100, growth="leafwise", min_child_samples=5)
        b = fit_gbt(X, y, 100, growth="leafwise", min_child_samples=5)
        assert np.array_equal(predict_gbt(a, X), predict_gbt(b, X))

    def test_min_child_samples(self):
        X, y = noisy(6, 40)
        ens = fit_gbt(X, y, 30, 3, 0.3, "leafwise", min_child_samples=8)
        for t in ens.trees:
            for leaf in np.flatnonzero(t.feature < 0):
                hits = np.sum(t.predict(X) == t.value[leaf])
                assert hits >= 8

    def test_constant_features_flagged(self):
        X = np.ones((20, 3))
        y = np.arange(20.0)
        ens = fit_gbt(X, y)
        assert ens.degenerate and ens.trees == ()
        assert np.all(predict_gbt(ens, X) == np.mean(y))


def test_errors():
    X, y = noisy(0, 20, 2)
    with pytest.raises(DataError, match="at least 10"):
        fit_gbt(X[:9], y[:9])
    with pytest.raises(DataError, match="lengths"):
        fit_gbt(X, y[:-1])
    with pytest.raises(DataError, match="non-finite"):
        fit_gbt(np.where(X > 1, np.nan, X), y)
    with pytest.raises(DataError, match="growth"):
        fit_gbt(X, y, growth="depthwise")
    with pytest.raises(DataError, match="learning_rate"):
        fit_gbt(X, y, learning_rate=0.0)
    with pytest.raises(DataError):
        fit_gbt(X, y, max_depth=0)
    with pytest.raises(DataError, match="features"):
        predict_gbt(fit_gbt(X, y, 5), X[:, :1])
