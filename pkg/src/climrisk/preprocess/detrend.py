from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError, DetrendError
from ..stats import HypothesisResult, adf_test

MIN_DETREND_LENGTH = 10
ADF_MIN_LENGTH = 15


@dataclass(frozen=True)
class DetrendResult:
    """Outcome of linear detrending.

    ``dy`` is the series re-levelled to the first fitted value and ``tt`` the
    removed trend, so ``dy + tt == y`` elementwise. When ``applied`` is False
    the input passed the stationarity gate and ``dy`` is ``y`` itself.
    """

    y: np.ndarray
    dy: np.ndarray
    tt: np.ndarray
    slope: float
    intercept: float
    adf_before: HypothesisResult | None
    adf_after: HypothesisResult | None
    applied: bool = True


def _complement(y, tt):
    # y - (y - tt) is exact whenever |tt| <= y, which makes dy + tt reproduce y bit for bit
    dy = y - tt
    return dy, y - dy


def _adf(y, max_lag):
    # ADF is undefined for a constant series; report no test rather than fail the detrend
    if y.size < ADF_MIN_LENGTH or np.ptp(y) == 0.0:
        return None
    return adf_test(y, max_lag)


def ols_line(y):
    """Slope and intercept of the least-squares line of ``y`` on t = 1..N."""
    y = np.asarray(y, dtype=float)
    t = np.arange(1, y.size + 1, dtype=float)
    tc = t - t.mean()
    slope = float(tc @ (y - y.mean()) / (tc @ tc))
    return slope, float(y.mean() - slope * t.mean())


def linear_detrend(y, run_adf: bool = True, max_lag: int | None = None,
                   min_length: int = MIN_DETREND_LENGTH) -> DetrendResult:
    """Remove an OLS time trend, shifting the result to the first fitted level.

    ``dy_t = y_t - yhat_t + yhat_1`` and ``tt_t = yhat_t - yhat_1``. ADF tests
    before and after are attached when the series is long enough.
    """
    y = np.asarray(y, dtype=float).ravel()
    if y.size < max(min_length, 3):
        raise DataError(f"detrending needs at least {max(min_length, 3)} values")
    if not np.all(np.isfinite(y)):
        raise DataError("series contains non-finite values")
    if np.any(y <= 0):
        raise DataError("series must be strictly positive")
    slope, intercept = ols_line(y)
    tt = slope * np.arange(y.size, dtype=float)
    dy, tt = _complement(y, tt)
    if np.any(dy <= 0):
        raise DetrendError(f"detrended series has {int(np.sum(dy <= 0))} non-positive values")
    before = after = None
    if run_adf:
        before, after = _adf(y, max_lag), _adf(dy, max_lag)
    return DetrendResult(y, dy, tt, slope, intercept, before, after, True)


def no_detrend(y, adf_before: HypothesisResult | None = None) -> DetrendResult:
    y = np.asarray(y, dtype=float).ravel()
    return DetrendResult(y, y.copy(), np.zeros_like(y), 0.0, float(np.mean(y)), adf_before, adf_before, False)


def gated_detrend(y, max_lag: int | None = None) -> DetrendResult:
    """Detrend unless the ADF test already rejects a unit root at 5%.

    Falls back to the untouched series when detrending would produce
    non-positive levels.
    """
    y = np.asarray(y, dtype=float).ravel()
    before = _adf(y, max_lag)
    if before is not None and before.reject_at_05:
        return no_detrend(y, before)
    try:
        res = linear_detrend(y, run_adf=False)
    except DetrendError:
        return no_detrend(y, before)
    after = _adf(res.dy, max_lag)
    return DetrendResult(res.y, res.dy, res.tt, res.slope, res.intercept, before, after, True)
