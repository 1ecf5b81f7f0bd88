"""Augmented Dickey-Fuller test with a constant, AIC lag selection and
MacKinnon (1994) approximate p-values."""
from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm

from ..errors import DataError, DegenerateError
from ._common import HypothesisResult, as_series

# MacKinnon (1994) response surface, constant-only regression, one I(1) series
_TAU_MAX = 2.74
_TAU_MIN = -18.83
_TAU_STAR = -1.61
_SMALLP = (2.1659, 1.4412, 3.8269e-2)
_LARGEP = (1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2)


def mackinnon_p(stat: float) -> float:
    if stat > _TAU_MAX:
        return 1.0
    if stat < _TAU_MIN:
        return 0.0
    coef = _SMALLP if stat <= _TAU_STAR else _LARGEP
    return float(norm.cdf(np.polyval(coef[::-1], stat)))


def default_max_lag(n: int) -> int:
    """Schwert's rule 12 (n/100)^(1/4), kept below n/3."""
    return max(0, min(math.ceil(12.0 * (n / 100.0) ** 0.25), math.ceil(n / 3.0) - 1))


def _design(y, dy, lag, nobs):
    """Rows for the last ``nobs`` differences: [const, y_{t-1}, dy_{t-1}..dy_{t-lag}]."""
    n = dy.size
    cols = [np.ones(nobs), y[n - nobs:n]]
    for i in range(1, lag + 1):
        cols.append(dy[n - nobs - i:n - i])
    return np.column_stack(cols), dy[n - nobs:]


def _ols(X, z):
    beta, *_ = np.linalg.lstsq(X, z, rcond=None)
    resid = z - X @ beta
    return beta, float(resid @ resid)


def _aic(ssr, nobs, k):
    if ssr <= 0.0:
        return -math.inf
    llf = -nobs / 2.0 * (math.log(2 * math.pi) + math.log(ssr / nobs) + 1.0)
    return -2.0 * llf + 2.0 * k


def adf_test(y, max_lag: int | None = None) -> HypothesisResult:
    """ADF regression ``dy_t = a + g*y_{t-1} + sum d_i dy_{t-i}`` and the t-ratio of ``g``.

    The lag order is picked by AIC over a common sample, then the chosen
    regression is re-estimated on all available observations. ``extra`` holds
    the used lag and the number of observations.
    """
    y = as_series(y, "y", 15)
    n = y.size
    if np.ptp(y) == 0.0:
        raise DegenerateError("ADF test undefined for a constant series")
    if max_lag is None:
        max_lag = default_max_lag(n)
    if max_lag < 0 or max_lag >= n / 3.0:
        raise DataError(f"max_lag={max_lag} must be in [0, n/3) for n={n}")
    dy = np.diff(y)

    nobs_common = dy.size - max_lag
    best_lag, best_aic = 0, math.inf
    for lag in range(max_lag + 1):
        X, z = _design(y, dy, lag, nobs_common)
        _, ssr = _ols(X, z)
        aic = _aic(ssr, nobs_common, X.shape[1])
        if aic < best_aic:
            best_lag, best_aic = lag, aic

    nobs = dy.size - best_lag
    X, z = _design(y, dy, best_lag, nobs)
    beta, ssr = _ols(X, z)
    gamma = beta[1]
    dof = nobs - X.shape[1]
    scale = float(np.std(X[:, 1])) or 1.0
    zscale = float(np.sqrt(np.mean(z * z)))
    if ssr <= (1e-12 * zscale) ** 2 * nobs:
        # exact fit: the sampling distribution is degenerate, so the sign of g decides
        if abs(gamma) * scale <= 1e-8 * zscale:
            stat = 0.0
        else:
            stat = math.copysign(math.inf, gamma)
    else:
        XtX_inv = np.linalg.pinv(X.T @ X)
        se = math.sqrt(ssr / dof * XtX_inv[1, 1])
        stat = float(gamma / se)
    return HypothesisResult(stat, mackinnon_p(stat), {"used_lag": best_lag, "nobs": nobs})
