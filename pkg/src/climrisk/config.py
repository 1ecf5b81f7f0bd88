"""Run configuration: a single YAML document with one section per subcommand.

Relative paths resolve against ``data_dir``, which defaults to the
``CLIMRISK_DATA_DIR`` environment variable and then to the bundled synthetic
data. Every option has a default, so an empty document is a valid config.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from .errors import ConfigError
from .evaluation import DETREND_MODES, METHODS, REDUCERS, TREE_METHODS, CvPlan, MethodParams
from .ingest import CROPS, SEASONS, VARIABLES
from .pricing import DEFAULT_ALPHA, DEFAULT_SIMS
from .stats import FAMILIES
from .synthetic import DATA_DIR, DAILY_STATES

ENV_DATA_DIR = "CLIMRISK_DATA_DIR"
PRICE_METHODS = ("hba", "im", "both")


@dataclass
class IndicesConfig:
    weather: dict = field(default_factory=lambda: {s: f"daily_{s}.csv" for s in DAILY_STATES})
    regions_file: str | None = "daily_regions.csv"
    regions: list | None = None
    base: float = 65.0
    aci_reference_years: list | None = None
    aci_components: str | None = None


@dataclass
class PredictConfig:
    seasonal: str = "synthetic_seasonal.csv"
    yields: str = "synthetic_yields.csv"
    crops: list = field(default_factory=lambda: ["corn"])
    regions: list | None = None
    models: list = field(default_factory=lambda: list(range(1, 23)))
    methods: list = field(default_factory=lambda: list(METHODS))
    reducers: object = field(default_factory=lambda: ["pca"])
    cv: dict = field(default_factory=lambda: {"N": 64, "M": 5, "k": 6})
    family: str = "table"
    detrend: str = "auto"
    per_split_detrend: bool = False
    gbt: dict = field(default_factory=dict)
    gam: dict = field(default_factory=dict)
    fpca_basis: int | None = None


@dataclass
class Scenario:
    name: str
    region: str
    season: str
    indexes: list


@dataclass
class PriceConfig:
    seasonal: str = "synthetic_seasonal.csv"
    alpha: float = DEFAULT_ALPHA
    n_sims: int = DEFAULT_SIMS
    seed: int = 12345
    method: str = "both"
    families: list = field(default_factory=lambda: list(FAMILIES))
    detrend: str = "auto"
    scenarios: list = field(default_factory=lambda: [
        {"name": "group1", "region": "NORTH", "season": "summer", "indexes": ["CDD", "T90"]},
        {"name": "group3", "region": "SOUTH", "season": "spring", "indexes": ["PRE", "P"]},
    ])


@dataclass
class PlotConfig:
    region: str | None = None
    report: str | None = None


@dataclass
class RunConfig:
    data_dir: str = ""
    output_dir: str = "climrisk_out"
    jobs: int = 1
    indices: IndicesConfig = field(default_factory=IndicesConfig)
    predict: PredictConfig = field(default_factory=PredictConfig)
    price: PriceConfig = field(default_factory=PriceConfig)
    plotdata: PlotConfig = field(default_factory=PlotConfig)

    def path(self, name) -> Path:
        p = Path(name)
        return p if p.is_absolute() else Path(self.data_dir) / p

    @property
    def out(self) -> Path:
        return Path(self.output_dir)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()

    def cv_plan(self) -> CvPlan | None:
        cv = self.predict.cv
        if not cv:
            return None
        if cv.get("k") in (None, "auto"):
            return CvPlan.auto(int(cv["N"]), int(cv.get("M", 5)))
        return CvPlan(int(cv["N"]), int(cv["M"]), int(cv["k"]))

    def method_params(self) -> MethodParams:
        p = self.predict
        kw = dict(p.gbt)
        if "lambda" in p.gam:
            kw["gam_lambda"] = p.gam["lambda"]
        if "basis_size" in p.gam:
            kw["gam_basis"] = p.gam["basis_size"]
        try:
            return MethodParams(family=p.family, detrend=p.detrend, per_split_detrend=p.per_split_detrend,
                                fpca_basis=p.fpca_basis, **kw)
        except TypeError as exc:
            raise ConfigError(f"bad model parameters: {exc}") from None

    def reducer_map(self) -> dict:
        """Method -> reducers to run."""
        red = self.predict.reducers
        if isinstance(red, dict):
            return {m: list(red.get(m, [])) for m in self.predict.methods}
        return {m: list(red) for m in self.predict.methods}


def _section(cls, raw, name):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in {name!r}: {', '.join(unknown)}")
    return cls(**raw)


def default_data_dir() -> str:
    return os.environ.get(ENV_DATA_DIR) or str(DATA_DIR)


def load_config(path=None, data_dir=None, output_dir=None) -> RunConfig:
    raw = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
    top = {k: v for k, v in raw.items() if k not in ("indices", "predict", "price", "plotdata")}
    known = {"data_dir", "output_dir", "jobs"}
    unknown = sorted(set(top) - known)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    cfg = RunConfig(
        data_dir=str(top.get("data_dir") or default_data_dir()),
        output_dir=str(top.get("output_dir", "climrisk_out")),
        jobs=int(top.get("jobs", 1)),
        indices=_section(IndicesConfig, raw.get("indices"), "indices"),
        predict=_section(PredictConfig, raw.get("predict"), "predict"),
        price=_section(PriceConfig, raw.get("price"), "price"),
        plotdata=_section(PlotConfig, raw.get("plotdata"), "plotdata"),
    )
    if path is not None and not Path(cfg.data_dir).is_absolute():
        cfg.data_dir = str((Path(path).parent / cfg.data_dir).resolve())
    if data_dir is not None:
        cfg.data_dir = str(data_dir)
    if output_dir is not None:
        cfg.output_dir = str(output_dir)
    return cfg


def _need_file(cfg: RunConfig, name, what):
    p = cfg.path(name)
    if not p.is_file():
        raise ConfigError(f"{what} file not found: {p}")


def _check_selection(values, allowed, what):
    if values is None:
        return
    if len(values) == 0:
        raise ConfigError(f"empty {what} selection")
    bad = [v for v in values if v not in allowed]
    if bad:
        raise ConfigError(f"unknown {what}: {bad}")


def validate_indices(cfg: RunConfig) -> None:
    ic = cfg.indices
    if not ic.weather:
        raise ConfigError("indices.weather lists no stations")
    for state, name in ic.weather.items():
        _need_file(cfg, name, f"daily weather ({state})")
    if ic.regions_file:
        _need_file(cfg, ic.regions_file, "region mapping")
    if ic.regions is not None and len(ic.regions) == 0:
        raise ConfigError("empty region selection")
    if ic.aci_components:
        _need_file(cfg, ic.aci_components, "ACI component")
    if ic.aci_reference_years is not None and len(ic.aci_reference_years) != 2:
        raise ConfigError("aci_reference_years must be [first, last]")


def validate_predict(cfg: RunConfig) -> None:
    p = cfg.predict
    _need_file(cfg, p.seasonal, "seasonal index")
    _need_file(cfg, p.yields, "yield")
    _check_selection(p.crops, CROPS, "crop")
    if p.regions is not None and len(p.regions) == 0:
        raise ConfigError("empty region selection")
    if not p.models:
        raise ConfigError("empty model selection")
    bad = [m for m in p.models if not isinstance(m, int) or not 1 <= m <= 22]
    if bad:
        raise ConfigError(f"model ids must lie in 1..22, got {bad}")
    _check_selection(p.methods, METHODS, "method")
    red = p.reducers
    if isinstance(red, dict):
        _check_selection(list(red), METHODS, "method")
    for method, reducers in cfg.reducer_map().items():
        _check_selection(reducers, REDUCERS, "reducer")
        if "raw" in reducers and method not in TREE_METHODS:
            raise ConfigError(f"reducer 'raw' is only available for tree methods, not {method}")
    if p.detrend not in DETREND_MODES:
        raise ConfigError(f"detrend must be one of {DETREND_MODES}")
    if p.family not in ("table", "auto", "normal", "gamma"):
        raise ConfigError("family must be table, auto, normal or gamma")
    cfg.cv_plan()
    cfg.method_params()
    if cfg.jobs < 1:
        raise ConfigError("jobs must be at least 1")


def scenarios(cfg: RunConfig) -> list[Scenario]:
    out = []
    for raw in cfg.price.scenarios:
        try:
            s = Scenario(**raw)
        except TypeError as exc:
            raise ConfigError(f"bad pricing scenario {raw!r}: {exc}") from None
        if s.season not in SEASONS:
            raise ConfigError(f"scenario {s.name}: unknown season {s.season!r}")
        _check_selection(s.indexes, VARIABLES, "index")
        out.append(s)
    return out


def validate_price(cfg: RunConfig) -> None:
    pc = cfg.price
    _need_file(cfg, pc.seasonal, "seasonal index")
    if not pc.alpha > 0:
        raise ConfigError("alpha must be positive")
    if pc.n_sims < 1:
        raise ConfigError("n_sims must be positive")
    if pc.method not in PRICE_METHODS:
        raise ConfigError(f"method must be one of {PRICE_METHODS}")
    _check_selection(pc.families, FAMILIES, "family")
    if pc.detrend not in DETREND_MODES:
        raise ConfigError(f"detrend must be one of {DETREND_MODES}")
    if not pc.scenarios:
        raise ConfigError("no pricing scenarios")
    scenarios(cfg)


def validate(cfg: RunConfig, sections=("indices", "predict", "price")) -> None:
    for s in sections:
        {"indices": validate_indices, "predict": validate_predict, "price": validate_price}[s](cfg)
