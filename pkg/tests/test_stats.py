import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from climrisk.errors import DataError, DegenerateError, InfeasibleFamilyError
from climrisk.stats import (
    FAMILIES,
    HypothesisResult,
    ad_two_sample,
    adf_test,
    ecdf,
    fit_distribution,
    sample_from_fit,
    select_best_distribution,
    spearman_rho,
)
from climrisk.stats.anderson import ad_p_value, critical_values
from climrisk.stats.unitroot import default_max_lag, mackinnon_p

finite = st.floats(-1e6, 1e6, allow_nan=False)


class TestSpearman:
    @pytest.mark.parametrize("x, y, rho", [
        ((1, 2, 3), (10, 20, 30), 1.0),
        ((1, 2, 3), (3, 2, 1), -1.0),
        ((1, 2, 3, 4), (1, 3, 2, 4), 0.8),
    ])
    def test_examples(self, x, y, rho):
        assert spearman_rho(x, y) == pytest.approx(rho, abs=1e-12)

    def test_matches_scipy_with_ties(self, rng):
        x = rng.integers(0, 5, 40).astype(float)
        y = x + rng.integers(0, 3, 40)
        assert spearman_rho(x, y) == pytest.approx(sps.spearmanr(x, y)[0], abs=1e-12)

    def test_constant_is_error_not_nan(self):
        with pytest.raises(DegenerateError):
            spearman_rho([1, 1, 1], [1, 2, 3])

    def test_length_checks(self):
        with pytest.raises(DataError):
            spearman_rho([1, 2], [1, 2])
        with pytest.raises(DataError):
            spearman_rho([1, 2, 3], [1, 2, 3, 4])

    @given(st.lists(st.tuples(finite, finite), min_size=3, max_size=30))
    def test_symmetric_and_monotone_invariant(self, pairs):
        x = np.array([p[0] for p in pairs])
        y = np.array([p[1] for p in pairs])
        if np.ptp(x) == 0 or np.ptp(y) == 0:
            return
        r = spearman_rho(x, y)
        assert -1 <= r <= 1
        assert spearman_rho(y, x) == r
        # scaling by 4 and negation are exact, hence strictly monotone in floating point
        assert spearman_rho(4.0 * x, y) == pytest.approx(r, abs=1e-12)
        assert spearman_rho(-x, y) == pytest.approx(-r, abs=1e-12)

    def test_nonlinear_monotone_transform(self, rng):
        x, y = rng.normal(size=50), rng.normal(size=50)
        assert spearman_rho(np.exp(x), y ** 3) == pytest.approx(spearman_rho(x, y), abs=1e-12)


class TestAndersonDarling:
    def test_identical_samples_clamped(self):
        a = np.arange(20.0)
        res = ad_two_sample(a, a)
        assert res.p_value == 0.25
        assert not res.reject_at_05

    def test_shift_rejected_beyond_one_percent(self, rng):
        a = rng.uniform(size=100)
        res = ad_two_sample(a, a + 10)
        assert res.statistic > critical_values(2)[4]
        assert res.p_value < 0.01 and res.reject_at_05

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_scipy(self, seed):
        r = np.random.default_rng(seed)
        a = np.round(r.normal(size=30), 1)
        b = np.round(r.normal(0.3, 1.2, size=45), 1)
        ours = ad_two_sample(a, b)
        ref = sps.anderson_ksamp([a, b])
        assert ours.statistic == pytest.approx(ref.statistic, rel=1e-10, abs=1e-12)
        assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-8)

    @given(st.lists(finite, min_size=5, max_size=25), st.lists(finite, min_size=5, max_size=25))
    def test_symmetric(self, a, b):
        if len(set(a) | set(b)) < 2:
            return
        r1, r2 = ad_two_sample(a, b), ad_two_sample(b, a)
        assert r1.statistic == r2.statistic
        assert r1.p_value == r2.p_value

    def test_small_samples_rejected(self):
        with pytest.raises(DataError):
            ad_two_sample([1, 2, 3, 4], [1, 2, 3, 4, 5])

    @given(st.floats(-5, 10))
    def test_p_value_clamped(self, s):
        assert 0.001 <= ad_p_value(s) <= 0.25

    def test_false_rejection_rate(self):
        rejections = 0
        for seed in range(100):
            r = np.random.default_rng(1000 + seed)
            rejections += ad_two_sample(r.normal(size=200), r.normal(size=200)).reject_at_05
        assert rejections <= 12


class TestAdf:
    def test_white_noise_rejects(self, white_noise):
        assert adf_test(white_noise).p_value < 0.05

    def test_random_walk_does_not_reject(self, random_walk):
        assert adf_test(random_walk).p_value > 0.05

    def test_pure_trend_does_not_reject(self):
        res = adf_test(np.arange(1.0, 65.0))
        assert res.p_value > 0.05
        assert res.statistic == 0.0

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_statsmodels(self, seed):
        sm = pytest.importorskip("statsmodels.tsa.stattools")
        r = np.random.default_rng(seed)
        y = np.cumsum(r.normal(size=80)) * (seed % 2) + r.normal(size=80)
        ours = adf_test(y)
        stat, p, lag, nobs, *_ = sm.adfuller(y, regression="c", autolag="AIC")
        assert ours.statistic == pytest.approx(stat, rel=1e-9)
        assert ours.p_value == pytest.approx(p, rel=1e-9, abs=1e-12)
        assert ours.extra == {"used_lag": lag, "nobs": nobs}

    def test_fixed_lag(self):
        sm = pytest.importorskip("statsmodels.tsa.stattools")
        y = np.random.default_rng(3).normal(size=50).cumsum()
        ours = adf_test(y, max_lag=4)
        stat, p, *_ = sm.adfuller(y, maxlag=4, regression="c", autolag="AIC")
        assert ours.statistic == pytest.approx(stat, rel=1e-9)

    def test_preconditions(self):
        with pytest.raises(DataError):
            adf_test(np.arange(14.0))
        with pytest.raises(DegenerateError):
            adf_test(np.ones(30))
        with pytest.raises(DataError, match="max_lag"):
            adf_test(np.random.default_rng(0).normal(size=30), max_lag=10)

    def test_mackinnon_tails(self):
        assert mackinnon_p(-30) == 0.0
        assert mackinnon_p(5) == 1.0
        assert mackinnon_p(-2.86) == pytest.approx(0.05, abs=2e-3)

    @given(st.integers(15, 5000))
    def test_default_lag_valid(self, n):
        assert 0 <= default_max_lag(n) < n / 3

    def test_hypothesis_result_flag(self):
        assert HypothesisResult(1.0, 0.049).reject_at_05
        assert not HypothesisResult(1.0, 0.05).reject_at_05


class TestDistributions:
    def test_gamma_consistency(self):
        x = np.random.default_rng(42).gamma(2.0, 3.0, 10_000)
        fit = fit_distribution(x, "gamma")
        assert fit.params[0] == pytest.approx(2.0, abs=0.1)
        assert fit.params[1] == pytest.approx(3.0, abs=0.15)

    @pytest.mark.parametrize("family, gen", [
        ("normal", lambda r, n: r.normal(5, 2, n)),
        ("gamma", lambda r, n: r.gamma(3, 2, n)),
        ("lognormal", lambda r, n: r.lognormal(1, 0.4, n)),
        ("weibull", lambda r, n: 2.5 * r.weibull(1.7, n)),
        ("beta", lambda r, n: r.beta(2, 5, n)),
    ])
    def test_mle_matches_scipy(self, family, gen):
        x = gen(np.random.default_rng(11), 2000)
        fit = fit_distribution(x, family)
        u = (x - fit.support_shift) / fit.support_scale
        if family == "normal":
            ref = sps.norm.fit(x)
        elif family == "gamma":
            a, _, s = sps.gamma.fit(x, floc=0)
            ref = (a, s)
        elif family == "lognormal":
            s, _, sc = sps.lognorm.fit(x, floc=0)
            ref = (np.log(sc), s)
        elif family == "weibull":
            c, _, s = sps.weibull_min.fit(x, floc=0)
            ref = (c, s)
        else:
            a, b, *_ = sps.beta.fit(np.clip(u, 1e-6, 1 - 1e-6), floc=0, fscale=1)
            ref = (a, b)
        np.testing.assert_allclose(fit.params, ref, rtol=2e-4)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_local_optimality(self, family):
        x = np.random.default_rng(5).gamma(4.0, 2.0, 300)
        fit = fit_distribution(x, family)
        base = fit.loglikelihood(x)
        for i in range(len(fit.params)):
            for step in (-1e-3, 1e-3):
                p = list(fit.params)
                p[i] = p[i] * (1 + step) if p[i] != 0 else step
                assert fit.with_params(p).loglikelihood(x) <= base + 1e-6 * abs(base)

    def test_symmetric_normal(self):
        fit = fit_distribution(np.tile([-1.0, 0.0, 1.0], 10), "normal")
        assert abs(fit.params[0]) < 1e-9

    def test_degenerate_and_infeasible(self):
        with pytest.raises(DegenerateError):
            fit_distribution(np.full(30, 5.0) + np.arange(30) * 1e-15, "normal")
        with pytest.raises(InfeasibleFamilyError):
            fit_distribution(-np.arange(1.0, 31.0), "gamma")
        with pytest.raises(InfeasibleFamilyError, match="no feasible family"):
            select_best_distribution(-np.arange(1.0, 31.0), {"gamma"})
        with pytest.raises(DataError):
            fit_distribution(np.arange(10.0), "normal")

    def test_selection(self):
        x = 3.0 * np.random.default_rng(8).weibull(1.3, 500)
        assert select_best_distribution(x, {"normal", "weibull"}).family == "weibull"
        assert select_best_distribution(x, {"gamma"}).family == "gamma"

    def test_selection_tie_break_by_enum_order(self, monkeypatch):
        from climrisk.stats import distributions as d
        x = np.random.default_rng(0).gamma(3, 1, 100)
        real = d.fit_distribution

        def same_score(data, family):
            f = real(data, family)
            return d.DistributionFit(f.family, f.params, f.support_shift, f.support_scale, 1.0, f.loglik)

        monkeypatch.setattr(d, "fit_distribution", same_score)
        assert d.select_best_distribution(x, {"weibull", "gamma", "lognormal"}).family == "gamma"

    def test_sampling_determinism_and_clt(self):
        fit = fit_distribution(np.random.default_rng(1).normal(10, 2, 200), "normal")
        assert np.array_equal(sample_from_fit(fit, 50, 7), sample_from_fit(fit, 50, 7))
        s = sample_from_fit(fit, 100_000, 3)
        assert abs(s.mean() - fit.params[0]) < 3 * fit.params[1] / np.sqrt(s.size)
        one = sample_from_fit(fit_distribution(np.random.default_rng(1).gamma(2, 1, 50), "gamma"), 1, 0)
        assert one.shape == (1,) and one[0] > 0

    def test_beta_samples_inside_rescaled_support(self):
        x = np.random.default_rng(2).uniform(3, 7, 200)
        fit = fit_distribution(x, "beta")
        s = sample_from_fit(fit, 5000, 1)
        assert s.min() >= fit.support_shift and s.max() <= fit.support_shift + fit.support_scale

    @pytest.mark.parametrize("family, params, tol", [
        ("normal", (3.0, 1.5), 0.02), ("gamma", (2.5, 1.2), 0.03), ("lognormal", (0.5, 0.3), 0.02),
        ("weibull", (1.8, 2.0), 0.02),
    ])
    def test_sample_fit_round_trip(self, family, params, tol):
        from climrisk.stats.distributions import DistributionFit
        truth = DistributionFit(family, params)
        refit = fit_distribution(sample_from_fit(truth, 100_000, 9), family)
        np.testing.assert_allclose(refit.params, params, rtol=tol, atol=tol)


def test_ecdf():
    x, f = ecdf([3.0, 1.0, 2.0, 2.0])
    assert x.tolist() == [1.0, 2.0, 2.0, 3.0]
    assert f[-1] == 1.0
    assert np.all(np.diff(f) > 0)
