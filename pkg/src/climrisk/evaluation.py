"""Time-ordered cross-validation and the model x method x reducer matrix runner.

Split ``m`` (1-based) trains on observations ``1 .. N-mk`` and tests on the
next ``k``. Errors are measured after re-adding the removed trend:
``|y_t - (dyhat_t + tt_t)| / y_t``.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ClimRiskError, ConfigError, DataError
from .ingest import SeasonalTable, atomic_write_text, yield_series
from .models import fit_gam, fit_gbt, fit_glm, predict_gam, predict_gbt, predict_glm
from .preprocess import build_design_matrix, gated_detrend, get_spec, linear_detrend, no_detrend, reduce
from .stats import select_best_distribution

log = logging.getLogger(__name__)

MIN_TRAIN = 10
METHODS = ("GLM", "GAM", "XGB", "LGBM")
TREE_METHODS = ("XGB", "LGBM")
REDUCERS = ("pca", "fpca", "raw")
DETREND_MODES = ("auto", "on", "off")

# Response family per (crop, region) used when family="table"; unlisted pairs fall
# back to picking the better of normal/gamma on the detrended series.
FAMILY_TABLE = {
    ("corn", "CEA"): "gamma", ("wheat", "CEA"): "normal", ("soybeans", "CEA"): "gamma",
    ("corn", "CWP"): "gamma", ("wheat", "CWP"): "normal",
    ("corn", "MID"): "gamma", ("wheat", "MID"): "gamma", ("soybeans", "MID"): "gamma",
    ("corn", "SEA"): "normal", ("wheat", "SEA"): "normal", ("soybeans", "SEA"): "gamma",
    ("corn", "SPL"): "normal", ("wheat", "SPL"): "gamma", ("soybeans", "SPL"): "gamma",
    ("corn", "SWP"): "normal", ("wheat", "SWP"): "normal",
}


@dataclass(frozen=True)
class CvPlan:
    n: int
    m: int
    k: int

    def __post_init__(self):
        if min(self.n, self.m, self.k) < 1:
            raise ConfigError("CV plan sizes must be positive")
        if self.n - self.m * self.k < MIN_TRAIN:
            raise ConfigError(
                f"infeasible plan N={self.n}, M={self.m}, k={self.k}: "
                f"smallest training set {self.n - self.m * self.k} < {MIN_TRAIN}")

    @classmethod
    def auto(cls, n: int, m: int = 5) -> "CvPlan":
        return cls(n, m, max(1, int(round(0.1 * n))))


def make_splits(plan: CvPlan) -> list[tuple[np.ndarray, np.ndarray]]:
    """Zero-based (train, test) index arrays; split m covers 1-based t = N-mk+1 .. N-mk+k."""
    out = []
    for m in range(1, plan.m + 1):
        cut = plan.n - m * plan.k
        out.append((np.arange(cut), np.arange(cut, cut + plan.k)))
    return out


def mape_with_trend(y, dy_hat, tt, indices=None) -> float:
    y = np.asarray(y, dtype=float)
    dy_hat = np.asarray(dy_hat, dtype=float)
    tt = np.asarray(tt, dtype=float)
    if not (y.shape == dy_hat.shape == tt.shape):
        raise DataError("y, predictions and trend are misaligned")
    if indices is not None:
        idx = np.asarray(indices, dtype=np.intp)
        y, dy_hat, tt = y[idx], dy_hat[idx], tt[idx]
    if y.size == 0:
        raise DataError("no observations to score")
    if np.any(y <= 0):
        raise DataError("observed yields must be positive")
    return float(np.mean(np.abs(y - (dy_hat + tt)) / y))


@dataclass(frozen=True)
class MethodParams:
    n_estimators: int = 500
    max_depth: int = 2
    learning_rate: float = 0.01
    reg_lambda: float = 1.0
    reg_gamma: float = 0.0
    lgbm_min_child_samples: int = 20
    gam_lambda: float = 1.0
    gam_basis: int = 6
    family: str = "table"  # table | auto | normal | gamma
    fpca_basis: int | None = None
    detrend: str = "auto"
    per_split_detrend: bool = False


DEFAULT_PARAMS = MethodParams()


@dataclass(frozen=True)
class CvReport:
    crop: str
    region: str
    model_id: int
    method: str
    reducer: str
    split_train: tuple = ()
    split_test: tuple = ()
    family: str | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def mape_train(self) -> float:
        return float(np.mean(self.split_train)) if self.split_train else math.nan

    @property
    def mape_test(self) -> float:
        return float(np.mean(self.split_test)) if self.split_test else math.nan

    @property
    def key(self):
        return (self.crop, self.region, self.model_id, METHODS.index(self.method), REDUCERS.index(self.reducer))


def validate_cell(method: str, reducer: str) -> None:
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {METHODS}")
    if reducer not in REDUCERS:
        raise ConfigError(f"unknown reducer {reducer!r}; choose from {REDUCERS}")
    if reducer == "raw" and method not in TREE_METHODS:
        raise ConfigError(f"reducer 'raw' is only available for tree methods, not {method}")


def detrend_series(y, mode: str = "auto"):
    if mode == "auto":
        return gated_detrend(y)
    if mode == "on":
        return linear_detrend(y)
    if mode == "off":
        return no_detrend(y)
    raise ConfigError(f"detrend mode must be one of {DETREND_MODES}")


def choose_family(crop: str, region: str, dy, family: str = "table") -> str:
    if family in ("normal", "gamma"):
        return family
    if family == "table" and (crop, region) in FAMILY_TABLE:
        return FAMILY_TABLE[(crop, region)]
    if family not in ("table", "auto"):
        raise ConfigError(f"unknown family option {family!r}")
    try:
        return select_best_distribution(dy, ("normal", "gamma")).family
    except ClimRiskError:
        return "normal"


def _fit_predict(method, family, X_train, y_train, X_all, params: MethodParams):
    if method == "GLM":
        return predict_glm(fit_glm(X_train, y_train, family), X_all)
    if method == "GAM":
        fit = fit_gam(X_train, y_train, family, params.gam_lambda, params.gam_basis)
        return predict_gam(fit, X_all)
    growth, min_child = ("levelwise", 1) if method == "XGB" else ("leafwise", params.lgbm_min_child_samples)
    ens = fit_gbt(X_train, y_train, params.n_estimators, params.max_depth, params.learning_rate, growth,
                  params.reg_lambda, params.reg_gamma, min_child)
    return predict_gbt(ens, X_all)


def _split_trend(y, train, params: MethodParams):
    """Trend removed for one split when re-detrending per split."""
    if params.detrend == "off":
        return y, np.zeros_like(y)
    res = detrend_series(y[train], params.detrend)
    if not res.applied:
        return y, np.zeros_like(y)
    tt = res.slope * np.arange(y.size, dtype=float)
    return y - tt, tt


def evaluate_cell(y, dy, tt, features, plan: CvPlan, method: str, family: str,
                  params: MethodParams = DEFAULT_PARAMS):
    """Per-split (train, test) MAPE for one cell."""
    train_err, test_err = [], []
    for train, test in make_splits(plan):
        if params.per_split_detrend:
            dy_s, tt_s = _split_trend(y, train, params)
        else:
            dy_s, tt_s = dy, tt
        pred = _fit_predict(method, family, features[train], dy_s[train], features, params)
        train_err.append(mape_with_trend(y, pred, tt_s, train))
        test_err.append(mape_with_trend(y, pred, tt_s, test))
    return tuple(train_err), tuple(test_err)


@dataclass(frozen=True)
class DataBundle:
    seasonal: SeasonalTable
    yields: tuple


def _features(bundle, region, years, model_id, reducer, params):
    design = build_design_matrix(get_spec(model_id), bundle.seasonal, region, years)
    if reducer == "raw":
        return design.values, None
    res = reduce(design, reducer, basis_size=params.fpca_basis if reducer == "fpca" else None)
    return res.scores, res


def _run_cell(task):
    crop, region, model_id, method, reducer, y, dy, tt, features, plan, family, params = task
    try:
        tr, te = evaluate_cell(y, dy, tt, features, plan, method, family, params)
        return CvReport(crop, region, model_id, method, reducer, tr, te, family if method in ("GLM", "GAM") else None)
    except ClimRiskError as exc:
        return CvReport(crop, region, model_id, method, reducer, family=family, error=f"{type(exc).__name__}: {exc}")


def run_matrix(bundle: DataBundle, crops, regions, model_ids=range(1, 23), methods=METHODS,
               reducers=("pca",), plan: CvPlan | None = None, params: MethodParams = DEFAULT_PARAMS,
               jobs: int = 1) -> list[CvReport]:
    """Run every requested (crop, region, model, method, reducer) cell.

    Reducer ``raw`` only pairs with tree methods; other raw pairings are
    skipped when several methods are requested together and rejected when
    requested alone. Detrending and dimension reduction run once per
    (crop, region) and (region, model, reducer) on the full series. Failing
    cells are reported with their error and the run continues.
    """
    for method in methods:
        validate_cell(method, "pca")
    for reducer in reducers:
        validate_cell(TREE_METHODS[0], reducer)
    if "raw" in reducers and not any(m in TREE_METHODS for m in methods):
        validate_cell(methods[0], "raw")
    tasks, reports = [], []
    for crop in crops:
        for region in regions:
            try:
                years, y = yield_series(bundle.yields, crop, region)
                cell_plan = plan or CvPlan.auto(y.size)
                if cell_plan.n != y.size:
                    raise DataError(f"plan expects {cell_plan.n} years, {crop}/{region} has {y.size}")
                det = detrend_series(y, params.detrend)
                family = choose_family(crop, region, det.dy, params.family)
            except ClimRiskError as exc:
                reports.extend(CvReport(crop, region, mid, meth, red, error=f"{type(exc).__name__}: {exc}")
                               for mid in model_ids for meth in methods for red in reducers
                               if red != "raw" or meth in TREE_METHODS)
                continue
            for model_id in model_ids:
                for reducer in reducers:
                    cell_methods = [m for m in methods if reducer != "raw" or m in TREE_METHODS]
                    try:
                        features, _ = _features(bundle, region, years, model_id, reducer, params)
                    except ClimRiskError as exc:
                        reports.extend(CvReport(crop, region, model_id, m, reducer,
                                                error=f"{type(exc).__name__}: {exc}") for m in cell_methods)
                        continue
                    for method in cell_methods:
                        tasks.append((crop, region, model_id, method, reducer, y, det.dy, det.tt, features,
                                      cell_plan, family, params))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports.extend(pool.map(_run_cell, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        reports.extend(_run_cell(t) for t in tasks)
    for r in reports:
        if not r.ok:
            log.warning("cell %s/%s model %d %s/%s failed: %s", r.crop, r.region, r.model_id, r.method,
                        r.reducer, r.error)
    return sorted(reports, key=lambda r: r.key)


def regional_averages(reports) -> list[dict]:
    """Mean train/test MAPE over models for each (crop, region, method, reducer)."""
    groups: dict = {}
    for r in reports:
        if r.ok:
            groups.setdefault((r.crop, r.region, r.method, r.reducer), []).append(r)
    rows = []
    for (crop, region, method, reducer), rs in sorted(
            groups.items(), key=lambda kv: (kv[0][0], kv[0][1], METHODS.index(kv[0][2]), REDUCERS.index(kv[0][3]))):
        rows.append({"crop": crop, "region": region, "method": method, "reducer": reducer, "n_models": len(rs),
                     "mape_train": float(np.mean([r.mape_train for r in rs])),
                     "mape_test": float(np.mean([r.mape_test for r in rs]))})
    return rows


def _fmt(v) -> str:
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else repr(float(v))


def report_csv_text(reports) -> str:
    """Per-split rows plus one ``pooled`` row per cell holding the split means."""
    lines = ["crop,region,model_id,method,reducer,split,mape_train,mape_test,family,error"]
    for r in reports:
        base = f"{r.crop},{r.region},{r.model_id},{r.method},{r.reducer}"
        fam = r.family or ""
        if r.ok:
            for i, (a, b) in enumerate(zip(r.split_train, r.split_test), start=1):
                lines.append(f"{base},{i},{_fmt(a)},{_fmt(b)},{fam},")
        err = (r.error or "").replace(",", ";").replace("\n", " ")
        lines.append(f"{base},pooled,{_fmt(r.mape_train)},{_fmt(r.mape_test)},{fam},{err}")
    return "\n".join(lines) + "\n"


def write_report(reports, path) -> None:
    atomic_write_text(path, report_csv_text(reports))


def write_regional_averages(reports, path) -> None:
    rows = regional_averages(reports)
    lines = ["crop,region,method,reducer,n_models,mape_train,mape_test"]
    lines += [f"{r['crop']},{r['region']},{r['method']},{r['reducer']},{r['n_models']},"
              f"{_fmt(r['mape_train'])},{_fmt(r['mape_test'])}" for r in rows]
    atomic_write_text(path, "\n".join(lines) + "\n")


def params_dict(params: MethodParams) -> dict:
    return asdict(params)


__all__ = ["CvPlan", "CvReport", "DataBundle", "MethodParams", "make_splits", "mape_with_trend",
           "run_matrix", "evaluate_cell", "validate_cell", "regional_averages", "write_report",
           "write_regional_averages", "report_csv_text", "choose_family", "detrend_series",
           "FAMILY_TABLE", "METHODS", "REDUCERS", "MIN_TRAIN"]
