from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DataError
from ..ingest import SEASONS, SeasonalTable


@dataclass(frozen=True)
class ModelSpec:
    id: int
    variables: tuple[str, ...]

    @property
    def label(self) -> str:
        return "-".join(self.variables)


MODEL_SPECS = {
    i: ModelSpec(i, tuple(v.split("-")))
    for i, v in {
        1: "CDD", 2: "HDD", 3: "PRE", 4: "CDD-HDD", 5: "CDD-PRE", 6: "HDD-PRE", 7: "CDD-HDD-PRE",
        8: "T90", 9: "T10", 10: "P", 11: "T90-T10", 12: "T90-P", 13: "T10-P", 14: "T90-T10-P",
        15: "T90-T10-P-W", 16: "T90-T10-P-D", 17: "T90-T10-P-S", 18: "T90-T10-P-W-D",
        19: "T90-T10-P-W-S", 20: "T90-T10-P-D-S", 21: "T90-T10-P-W-D-S", 22: "ACI",
    }.items()
}
SINGLE_VARIABLE_SPECS = tuple(i for i, s in MODEL_SPECS.items() if len(s.variables) == 1)


def get_spec(model_id: int) -> ModelSpec:
    try:
        return MODEL_SPECS[int(model_id)]
    except (KeyError, ValueError):
        raise ConfigError(f"model id {model_id!r} not in 1..22") from None


@dataclass(frozen=True)
class DesignMatrix:
    values: np.ndarray
    years: np.ndarray
    columns: tuple[tuple[str, str], ...]
    spec_id: int | None = None

    @property
    def shape(self):
        return self.values.shape

    @property
    def column_labels(self) -> list[str]:
        return [f"{v}_{s}" for v, s in self.columns]


def build_design_matrix(spec: ModelSpec | int, seasonal: SeasonalTable, region: str, years) -> DesignMatrix:
    """Rows are years; columns run over the model's variables, each with its
    winter, spring, summer and autumn values."""
    if not isinstance(spec, ModelSpec):
        spec = get_spec(spec)
    years = np.asarray(list(years), dtype=int)
    if years.size == 0:
        raise DataError("no years requested")
    if np.any(np.diff(years) <= 0):
        raise DataError("years must be strictly increasing")
    columns = tuple((v, s) for v in spec.variables for s in SEASONS)
    values = np.empty((years.size, len(columns)))
    for j, (var, season) in enumerate(columns):
        for i, year in enumerate(years):
            values[i, j] = seasonal.get(region, var, int(year), season)
    return DesignMatrix(values, years, columns, spec.id)


def matrix_from_array(values, years=None) -> DesignMatrix:
    """Wrap a bare array (columns labelled c0, c1, ...) for the reducers."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise DataError("design matrix must be two-dimensional")
    if years is None:
        years = np.arange(values.shape[0])
    return DesignMatrix(values, np.asarray(years), tuple((f"c{j}", "") for j in range(values.shape[1])))
