from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError


@dataclass(frozen=True)
class HypothesisResult:
    statistic: float
    p_value: float
    extra: dict | None = None

    @property
    def reject_at_05(self) -> bool:
        return self.p_value < 0.05


def as_series(x, name="series", min_len=1) -> np.ndarray:
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size < min_len:
        raise DataError(f"{name} needs at least {min_len} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr
