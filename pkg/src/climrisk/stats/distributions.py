"""Maximum-likelihood fits for a small set of parametric families, ranked by
the residual sum of squares between fitted density and histogram."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special, stats

from ..errors import DataError, DegenerateError, InfeasibleFamilyError
from ._common import as_series

# enum order doubles as the tie-break order in select_best_distribution
FAMILIES = ("normal", "gamma", "lognormal", "weibull", "beta")
BETA_EPS = 1e-6
MIN_FIT_LENGTH = 20


@dataclass(frozen=True)
class DistributionFit:
    family: str
    params: tuple
    support_shift: float = 0.0
    support_scale: float = 1.0
    fit_score: float = 0.0
    loglik: float = field(default=float("nan"), compare=False)

    @property
    def frozen(self):
        """The scipy frozen distribution on the fitted (unshifted) scale."""
        p = self.params
        if self.family == "normal":
            return stats.norm(loc=p[0], scale=p[1])
        if self.family == "gamma":
            return stats.gamma(p[0], scale=p[1])
        if self.family == "lognormal":
            return stats.lognorm(p[1], scale=math.exp(p[0]))
        if self.family == "weibull":
            return stats.weibull_min(p[0], scale=p[1])
        if self.family == "beta":
            return stats.beta(p[0], p[1])
        raise ValueError(self.family)

    def _to_unit(self, x):
        return (np.asarray(x, dtype=float) - self.support_shift) / self.support_scale

    def pdf(self, x):
        return self.frozen.pdf(self._to_unit(x)) / self.support_scale

    def loglikelihood(self, data) -> float:
        x = np.asarray(data, dtype=float)
        return float(np.sum(self.frozen.logpdf(self._to_unit(x))) - x.size * math.log(self.support_scale))

    def ppf(self, q):
        return self.support_shift + self.support_scale * self.frozen.ppf(q)

    def mean(self) -> float:
        return float(self.support_shift + self.support_scale * self.frozen.mean())

    def with_params(self, params) -> "DistributionFit":
        return DistributionFit(self.family, tuple(params), self.support_shift, self.support_scale)


def _check_spread(x):
    scale = max(1.0, float(np.max(np.abs(x))))
    if np.ptp(x) <= 1e-12 * scale:
        raise DegenerateError("data has (numerically) zero spread")


def _require_positive(x, family):
    if np.any(x <= 0):
        raise InfeasibleFamilyError(f"{family} needs strictly positive data")


def _bracket_root(f, x0):
    lo, hi = x0 / 2.0, x0 * 2.0
    for _ in range(200):
        if f(lo) > 0:
            break
        lo /= 2.0
    for _ in range(200):
        if f(hi) < 0:
            break
        hi *= 2.0
    return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)


def _mle_normal(x):
    return float(np.mean(x)), float(np.std(x))


def _mle_lognormal(x):
    lx = np.log(x)
    return float(np.mean(lx)), float(np.std(lx))


def _mle_gamma(x):
    s = math.log(np.mean(x)) - float(np.mean(np.log(x)))
    if s <= 0:
        raise DegenerateError("gamma MLE undefined for zero log-spread")
    k0 = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    # log k - digamma(k) decreases from +inf to 0
    k = _bracket_root(lambda k: math.log(k) - special.digamma(k) - s, k0)
    return k, float(np.mean(x)) / k


def _mle_weibull(x):
    z = x / np.max(x)
    lz = np.log(z)
    mean_lz = float(np.mean(lz))

    def score(k):
        w = z ** k
        return float(np.sum(w * lz) / np.sum(w)) - 1.0 / k - mean_lz

    # score increases in k from -inf
    k = _bracket_root(lambda k: -score(k), 1.2 / max(float(np.std(lz)), 1e-12))
    scale = float(np.max(x)) * float(np.mean(z ** k)) ** (1.0 / k)
    return k, scale


def _mle_beta(u):
    lu, l1u = float(np.mean(np.log(u))), float(np.mean(np.log1p(-u)))
    m, v = float(np.mean(u)), float(np.var(u))
    common = m * (1 - m) / v - 1 if v > 0 else 1.0
    theta = np.log([max(m * common, 1e-3), max((1 - m) * common, 1e-3)])

    def nll(t):
        a, b = np.exp(t)
        return -((a - 1) * lu + (b - 1) * l1u - special.betaln(a, b))

    def grad(t):
        a, b = np.exp(t)
        dab = special.digamma(a + b)
        ga = lu - special.digamma(a) + dab
        gb = l1u - special.digamma(b) + dab
        return -np.array([ga * a, gb * b])

    res = optimize.minimize(nll, theta, jac=grad, method="BFGS", options={"gtol": 1e-12, "maxiter": 1000})
    t = res.x
    # Newton polish on (a, b) directly
    a, b = np.exp(t)
    for _ in range(50):
        dab, tab = special.digamma(a + b), special.polygamma(1, a + b)
        g = np.array([lu - special.digamma(a) + dab, l1u - special.digamma(b) + dab])
        H = np.array([[-special.polygamma(1, a) + tab, tab], [tab, -special.polygamma(1, b) + tab]])
        step = np.linalg.solve(H, -g)
        while a + step[0] <= 0 or b + step[1] <= 0:
            step /= 2.0
        a, b = a + step[0], b + step[1]
        if np.max(np.abs(step) / np.array([a, b])) < 1e-14:
            break
    return float(a), float(b)


def histogram_density(data):
    """Histogram density with Freedman-Diaconis bins (at least five)."""
    x = np.asarray(data, dtype=float)
    edges = np.histogram_bin_edges(x, bins="fd")
    if edges.size - 1 < 5:
        edges = np.linspace(x.min(), x.max(), 6)
    dens, edges = np.histogram(x, bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, dens


def fit_distribution(data, family: str) -> DistributionFit:
    """Maximum-likelihood fit of one family; ``fit_score`` is the histogram RSS.

    Beta fits rescale the data into ``[eps, 1 - eps]`` first; the affine map is
    kept in ``support_shift`` / ``support_scale``.
    """
    if family not in FAMILIES:
        raise DataError(f"unknown family {family!r}; choose from {FAMILIES}")
    x = as_series(data, "data", MIN_FIT_LENGTH)
    _check_spread(x)
    shift, scale = 0.0, 1.0
    if family == "normal":
        params = _mle_normal(x)
    elif family == "lognormal":
        _require_positive(x, family)
        params = _mle_lognormal(x)
    elif family == "gamma":
        _require_positive(x, family)
        params = _mle_gamma(x)
    elif family == "weibull":
        _require_positive(x, family)
        params = _mle_weibull(x)
    else:
        lo, hi = float(x.min()), float(x.max())
        scale = (hi - lo) / (1.0 - 2.0 * BETA_EPS)
        shift = lo - BETA_EPS * scale
        u = np.clip((x - shift) / scale, BETA_EPS, 1.0 - BETA_EPS)
        params = _mle_beta(u)
    positive = params[1:] if family in ("normal", "lognormal") else params
    if not all(math.isfinite(p) for p in params) or min(positive) <= 0:
        raise DegenerateError(f"{family} fit did not produce valid parameters")
    fit = DistributionFit(family, tuple(float(p) for p in params), shift, scale)
    centers, dens = histogram_density(x)
    rss = float(np.sum((fit.pdf(centers) - dens) ** 2))
    if not math.isfinite(rss):
        raise DegenerateError(f"{family} fit score is not finite")
    return DistributionFit(fit.family, fit.params, shift, scale, rss, fit.loglikelihood(x))


def select_best_distribution(data, families=FAMILIES) -> DistributionFit:
    """Feasible fit with the smallest histogram RSS (earlier family wins ties)."""
    fams = [f for f in FAMILIES if f in set(families)]
    unknown = set(families) - set(FAMILIES)
    if unknown:
        raise DataError(f"unknown families {sorted(unknown)}")
    best = None
    for fam in fams:
        try:
            fit = fit_distribution(data, fam)
        except InfeasibleFamilyError:
            continue
        if best is None or fit.fit_score < best.fit_score:
            best = fit
    if best is None:
        raise InfeasibleFamilyError("no feasible family for the data")
    return best


def sample_from_fit(fit: DistributionFit, n: int, seed) -> np.ndarray:
    """Inverse-CDF draws; fully determined by ``(fit, n, seed)``."""
    if n < 1:
        raise DataError("n must be at least 1")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    # keep u away from 0 so heavy left tails stay finite
    u = np.where(u == 0.0, np.finfo(float).tiny, u)
    return np.asarray(fit.ppf(u), dtype=float)
