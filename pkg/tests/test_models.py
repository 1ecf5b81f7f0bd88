import numpy as np
import pytest
import statsmodels.api as sm
from hypothesis import given, settings
from hypothesis import strategies as st

from climrisk.errors import DataError
from climrisk.models import fit_gam, fit_glm, predict_gam, predict_glm


def design(seed, n=60, p=3):
    return np.random.default_rng(seed).normal(size=(n, p))


class TestGlm:
    @pytest.mark.parametrize("family", ["normal", "gamma"])
    def test_noiseless_recovery(self, family):
        X = design(0)
        beta = np.array([3.0, 0.2, -0.1, 0.05])
        y = np.exp(beta[0] + X @ beta[1:])
        fit = fit_glm(X, y, family)
        assert fit.converged
        np.testing.assert_allclose(fit.beta, beta, atol=1e-6)
        np.testing.assert_allclose(predict_glm(fit, X), y, rtol=1e-6)

    @pytest.mark.parametrize("family, sm_family", [
        ("normal", sm.families.Gaussian(sm.families.links.Log())),
        ("gamma", sm.families.Gamma(sm.families.links.Log())),
    ])
    def test_statsmodels_oracle(self, family, sm_family):
        r = np.random.default_rng(11)
        X = r.normal(size=(64, 4))
        mu = np.exp(4.0 + X @ np.array([0.1, -0.05, 0.02, 0.0]))
        y = r.gamma(50.0, mu / 50.0)
        fit = fit_glm(X, y, family)
        ref = sm.GLM(y, sm.add_constant(X), family=sm_family).fit(tol=1e-12)
        np.testing.assert_allclose(fit.beta, ref.params, rtol=1e-5, atol=1e-7)
        np.testing.assert_allclose(fit.dispersion, ref.scale, rtol=1e-4)

    @pytest.mark.parametrize("family", ["normal", "gamma"])
    def test_constant_response(self, family):
        X = design(1, 30, 2)
        fit = fit_glm(X, np.full(30, 42.0), family)
        np.testing.assert_allclose(predict_glm(fit, X), 42.0, rtol=1e-8)

    def test_gamma_mean_unbiased(self):
        # the average over replications of the fitted mean tracks the truth
        X = design(2, 80, 2)
        mu = np.exp(3.0 + X @ np.array([0.3, -0.2]))
        preds = []
        for rep in range(20):
            y = np.random.default_rng(100 + rep).gamma(10.0, mu / 10.0)
            preds.append(predict_glm(fit_glm(X, y, "gamma"), X))
        rel = np.mean(preds, axis=0) / mu - 1
        assert np.max(np.abs(rel)) < 0.05
        assert abs(np.mean(rel)) < 0.01

    @pytest.mark.parametrize("family", ["normal", "gamma"])
    def test_score_equations(self, family):
        # at the MLE with log link: sum w*(y-mu)/mu * x = 0
        r = np.random.default_rng(3)
        X = r.normal(size=(50, 3))
        y = r.gamma(20.0, np.exp(2 + 0.2 * X[:, 0]) / 20.0)
        fit = fit_glm(X, y, family)
        mu = predict_glm(fit, X)
        Xi = np.column_stack([np.ones(50), X])
        resid = (y - mu) * mu if family == "normal" else (y - mu) / mu
        np.testing.assert_allclose(Xi.T @ resid, 0.0, atol=1e-5 * np.abs(y).sum())

    @settings(max_examples=30)
    @given(st.integers(0, 10_000), st.sampled_from(["normal", "gamma"]))
    def test_deviance_non_increasing_and_positive(self, seed, family):
        r = np.random.default_rng(seed)
        X = r.normal(size=(40, 3))
        y = r.gamma(r.uniform(2, 40), np.exp(r.normal(3, 1) + X @ r.normal(0, 0.3, 3)) / 5)
        fit = fit_glm(X, y, family)
        assert np.all(np.diff(fit.deviance_history) <= 1e-9 * abs(fit.deviance_history[0]) + 1e-12)
        pred = predict_glm(fit, r.normal(0, 3, size=(10, 3)))
        assert np.all(pred > 0) and np.all(np.isfinite(pred))

    def test_errors(self):
        X = design(0, 20, 2)
        with pytest.raises(DataError, match="positive"):
            fit_glm(X, np.r_[np.ones(19), 0.0])
        with pytest.raises(DataError):
            fit_glm(X[:5], np.ones(5))
        with pytest.raises(DataError, match="family"):
            fit_glm(X, np.ones(20), "poisson")
        with pytest.raises(DataError, match="lengths"):
            fit_glm(X, np.ones(19))
        with pytest.raises(DataError, match="features"):
            predict_glm(fit_glm(X, np.arange(1.0, 21.0)), X[:, :1])


class TestGam:
    def test_heavy_penalty_matches_glm(self):
        r = np.random.default_rng(4)
        X = r.normal(size=(64, 3))
        y = np.exp(3 + X @ np.array([0.2, -0.1, 0.05])) * r.gamma(40, 1 / 40, 64)
        gam = fit_gam(X, y, "gamma", smoothing_lambda=1e8)
        glm = fit_glm(X, y, "gamma")
        np.testing.assert_allclose(predict_gam(gam, X), predict_glm(glm, X), rtol=1e-4)

    def test_nonlinear_signal(self):
        r = np.random.default_rng(5)
        x = r.uniform(-2, 2, 80)
        mu = np.exp(2 + 0.5 * np.sin(2 * x))
        y = mu * r.gamma(200, 1 / 200, 80)
        gam = fit_gam(x, y, "gamma", smoothing_lambda=0.1)
        glm = fit_glm(x, y, "gamma")
        err_gam = np.mean((predict_gam(gam, x) - mu) ** 2)
        err_glm = np.mean((predict_glm(glm, x) - mu) ** 2)
        assert err_gam < 0.2 * err_glm

    def test_smooths_centered(self):
        X = design(6, 50, 2)
        y = np.exp(1 + 0.3 * X[:, 0] ** 2 - 0.1 * X[:, 1])
        fit = fit_gam(X, y)
        np.testing.assert_allclose(fit.smooths(X).sum(axis=0), 0.0, atol=1e-9)

    def test_constant_response(self):
        X = design(7, 30, 2)
        fit = fit_gam(X, np.full(30, 9.0), "gamma")
        np.testing.assert_allclose(predict_gam(fit, X), 9.0, rtol=1e-8)

    def test_extrapolation_is_finite(self):
        X = design(8, 40, 1)
        fit = fit_gam(X, np.exp(1 + 0.2 * X[:, 0]))
        pred = predict_gam(fit, np.array([[-50.0], [50.0]]))
        assert np.all(np.isfinite(pred)) and np.all(pred > 0)

    def test_deviance_non_increasing(self):
        r = np.random.default_rng(9)
        X = r.normal(size=(40, 2))
        y = r.gamma(5, np.exp(2 + X[:, 0]) / 5)
        h = fit_gam(X, y, "gamma").deviance_history
        assert np.all(np.diff(h) <= 1e-12 * abs(h[0]))

    def test_errors(self):
        X = design(0, 20, 2)
        with pytest.raises(DataError):
            fit_gam(X, np.ones(20), smoothing_lambda=-1)
        with pytest.raises(DataError):
            fit_gam(X, np.ones(20), basis_size=3)
        with pytest.raises(DataError, match="features"):
            predict_gam(fit_gam(X, np.arange(1.0, 21.0)), X[:, :1])
