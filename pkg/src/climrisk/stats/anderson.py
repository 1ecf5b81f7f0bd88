"""Two-sample Anderson-Darling test (Scholz & Stephens 1987, midrank version)."""
from __future__ import annotations

import math

import numpy as np

from ..errors import DataError, DegenerateError
from ._common import HypothesisResult, as_series

# interpolation coefficients of the standardized critical values,
# significance levels 25%, 10%, 5%, 2.5%, 1%, 0.5%, 0.1%
_SIG = np.array([0.25, 0.1, 0.05, 0.025, 0.01, 0.005, 0.001])
_B0 = np.array([0.675, 1.281, 1.645, 1.96, 2.326, 2.573, 3.085])
_B1 = np.array([-0.245, 0.25, 0.678, 1.149, 1.822, 2.364, 3.615])
_B2 = np.array([-0.105, -0.305, -0.362, -0.391, -0.396, -0.345, -0.154])

P_MIN, P_MAX = 0.001, 0.25


def critical_values(k: int = 2) -> np.ndarray:
    m = k - 1
    return _B0 + _B1 / math.sqrt(m) + _B2 / m


def _akn_midrank(samples, pooled_sorted):
    N = pooled_sorted.size
    zstar, counts = np.unique(pooled_sorted, return_counts=True)
    b = np.cumsum(counts)
    b_mid = b - counts / 2.0
    denom = b_mid * (N - b_mid) - N * counts / 4.0
    terms = []
    for s in samples:
        n_i = s.size
        s_sorted = np.sort(s)
        m_le = np.searchsorted(s_sorted, zstar, side="right")
        f = m_le - np.searchsorted(s_sorted, zstar, side="left")
        m_mid = m_le - f / 2.0
        num = counts / N * (N * m_mid - n_i * b_mid) ** 2
        terms.append(math.fsum((num / denom).tolist()) / n_i)
    return (N - 1.0) / N * math.fsum(terms)


def _sigma_sq(n, N, k):
    H = math.fsum((1.0 / n).tolist())
    hs_cs = np.cumsum(1.0 / np.arange(N - 1, 1, -1))
    h = hs_cs[-1] + 1
    g = float(np.sum(hs_cs / np.arange(2, N)))
    a = (4 * g - 6) * (k - 1) + (10 - 6 * g) * H
    b = (2 * g - 4) * k ** 2 + 8 * h * k + (2 * g - 14 * h - 4) * H - 8 * h + 4 * g - 6
    c = (6 * h + 2 * g - 2) * k ** 2 + (4 * h - 4 * g + 6) * k + (2 * h - 6) * H + 4 * h
    d = (2 * h + 6) * k ** 2 - 4 * h * k
    return (a * N ** 3 + b * N ** 2 + c * N + d) / ((N - 1.0) * (N - 2.0) * (N - 3.0))


def ad_p_value(statistic: float, k: int = 2) -> float:
    """Interpolated p-value, clamped to [0.001, 0.25]."""
    crit = critical_values(k)
    if statistic <= crit.min():
        return P_MAX
    if statistic >= crit.max():
        return P_MIN
    coef = np.polyfit(crit, np.log(_SIG), 2)
    return float(np.clip(math.exp(np.polyval(coef, statistic)), P_MIN, P_MAX))


def ad_two_sample(a, b) -> HypothesisResult:
    """Standardized two-sample A-D statistic and its interpolated p-value."""
    a = as_series(a, "a", 5)
    b = as_series(b, "b", 5)
    pooled = np.sort(np.concatenate([a, b]))
    if np.unique(pooled).size < 2:
        raise DegenerateError("A-D test needs at least two distinct observations")
    n = np.array([a.size, b.size], dtype=float)
    N = pooled.size
    if N < 4:
        raise DataError("samples too small")
    akn = _akn_midrank([a, b], pooled)
    stat = (akn - 1.0) / math.sqrt(_sigma_sq(n, N, 2))
    return HypothesisResult(float(stat), ad_p_value(stat, 2), {"akn": akn})
