from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from ..errors import DataError, DegenerateError
from ._common import as_series


def spearman_rho(x, y) -> float:
    """Spearman rank correlation: Pearson correlation of the mid-ranks."""
    x = as_series(x, "x", 3)
    y = as_series(y, "y", 3)
    if x.size != y.size:
        raise DataError(f"length mismatch: {x.size} vs {y.size}")
    rx = rankdata(x) - (x.size + 1) / 2.0
    ry = rankdata(y) - (y.size + 1) / 2.0
    sxx = float(rx @ rx)
    syy = float(ry @ ry)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateError("rank correlation undefined for a constant series")
    rho = float(rx @ ry) / np.sqrt(sxx * syy)
    return float(np.clip(rho, -1.0, 1.0))


def ecdf(values):
    """Sorted values and their empirical CDF levels i/n (last level is exactly 1)."""
    v = np.sort(as_series(values, "values"))
    return v, np.arange(1, v.size + 1) / v.size
