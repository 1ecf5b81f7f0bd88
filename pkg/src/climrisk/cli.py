"""Command-line entry point.

Subcommands: ``indices``, ``predict``, ``price``, ``plotdata`` and
``validate-config``. Exit codes: 0 success, 1 when some pipeline cells
failed, 2 for configuration, validation or input errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__, _accel
from .config import PRICE_METHODS, RunConfig, Scenario, load_config, scenarios, validate
from .errors import ClimRiskError, ConfigError
from .evaluation import DataBundle, run_matrix, write_regional_averages, write_report
from .indices import aci_components_from_daily, composite_aci, daily_to_monthly
from .ingest import (SeasonalTable, atomic_write_text, aggregate_states_to_region, load_daily_weather,
                     load_regions, load_seasonal, load_yields, monthly_to_seasonal, write_monthly,
                     write_seasonal)
from .preprocess import MODEL_SPECS, build_design_matrix, fpca, pca
from .pricing import (OptionContract, compare_payoffs, contract_seeds, hba_price, im_price, write_payoffs,
                      write_simulated_payoffs)
from .stats import FAMILIES, ecdf

log = logging.getLogger("climrisk")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def _versions() -> dict:
    import scipy

    out = {"climrisk": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
           "python": platform.python_version(), "backend": _accel.BACKEND}
    if _accel.HAVE_NUMBA:
        import numba

        out["numba"] = numba.__version__
    return out


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(directory: Path, command: str, cfg: RunConfig, outputs, **extra) -> None:
    manifest = {
        "command": command,
        "config_hash": cfg.digest(),
        "config": cfg.to_dict(),
        "versions": _versions(),
        "outputs": {p.name: _sha256(p) for p in sorted(outputs)},
        **extra,
    }
    atomic_write_text(directory / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")


# ---------------------------------------------------------------------------
# indices

def cmd_indices(cfg: RunConfig) -> int:
    validate(cfg, ("indices",))
    ic = cfg.indices
    monthly, aci_parts = [], []
    for state, name in sorted(ic.weather.items()):
        weather = load_daily_weather(cfg.path(name))
        if weather.rejected:
            log.warning("%s: %d rows rejected (tmax < tmin)", name, weather.rejected)
        monthly += daily_to_monthly(weather, state, ic.base)
        if ic.aci_reference_years:
            aci_parts += list(aci_components_from_daily(weather, state, tuple(ic.aci_reference_years)))
    seasonal, gaps = monthly_to_seasonal(monthly)
    aci = SeasonalTable(aci_parts) if aci_parts else None
    if ic.regions_file:
        mapping = load_regions(cfg.path(ic.regions_file))
        seasonal = aggregate_states_to_region(seasonal, mapping)
        if aci is not None:
            aci = aggregate_states_to_region(aci, mapping)
    if ic.regions is not None:
        missing = sorted(set(ic.regions) - set(seasonal.regions()))
        if missing:
            raise ConfigError(f"regions not present in the data: {missing}")
        seasonal = SeasonalTable(r for r in seasonal if r.region in ic.regions)
        if aci is not None:
            aci = SeasonalTable(r for r in aci if r.region in ic.regions)
    out = cfg.out / "indices"
    written = [out / "index_monthly.csv", out / "index_seasonal.csv", out / "season_gaps.csv"]
    write_monthly(monthly, written[0])
    write_seasonal(seasonal, written[1])
    atomic_write_text(written[2], "region,variable,year,season,missing_months\n" + "".join(
        f"{g.region},{g.variable},{g.year},{g.season},{' '.join(map(str, g.missing_months))}\n" for g in gaps))
    if aci is not None:
        if ic.aci_components:
            extra = load_seasonal(cfg.path(ic.aci_components))
            aci = aci.merge(SeasonalTable(r for r in extra if r.variable in ("D", "W", "S")))
            aci = aci.merge(composite_aci(aci))
        written.append(out / "aci_seasonal.csv")
        write_seasonal(aci, written[-1])
    write_manifest(out, "indices", cfg, written, n_gaps=len(gaps))
    log.info("indices: %d seasonal rows, %d incomplete seasons", len(seasonal), len(gaps))
    return EXIT_OK


# ---------------------------------------------------------------------------
# predict

def _bundle(cfg: RunConfig) -> DataBundle:
    p = cfg.predict
    return DataBundle(load_seasonal(cfg.path(p.seasonal)), tuple(load_yields(cfg.path(p.yields))))


def cmd_predict(cfg: RunConfig) -> int:
    validate(cfg, ("predict",))
    p = cfg.predict
    bundle = _bundle(cfg)
    regions = p.regions or bundle.seasonal.regions()
    plan = cfg.cv_plan()
    params = cfg.method_params()
    reports = []
    for method, reducers in cfg.reducer_map().items():
        if reducers:
            reports += run_matrix(bundle, p.crops, regions, p.models, (method,), tuple(reducers), plan, params,
                                  jobs=cfg.jobs)
    reports.sort(key=lambda r: r.key)
    out = cfg.out / "predict"
    written = [out / "report.csv", out / "regional_averages.csv"]
    write_report(reports, written[0])
    write_regional_averages(reports, written[1])
    failed = [r for r in reports if not r.ok]
    basis = {}
    if any("fpca" in r for r in cfg.reducer_map().values()):
        for mid in p.models:
            ncol = 4 * len(MODEL_SPECS[mid].variables)
            basis[str(mid)] = p.fpca_basis or min(ncol, 12)
    write_manifest(out, "predict", cfg, written, n_cells=len(reports), n_failed=len(failed),
                   fpca_basis_sizes=basis, plan=None if plan is None else vars(plan))
    log.info("predict: %d cells, %d failed", len(reports), len(failed))
    if reports and len(failed) == len(reports):
        log.error("every cell failed")
    return EXIT_PARTIAL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# price

def _contracts(cfg: RunConfig, table: SeasonalTable, scen: Scenario):
    out = []
    for var in scen.indexes:
        years, values = table.series(scen.region, var, scen.season)
        name = f"{scen.name}_{scen.region}_{scen.season}_{var}"
        out.append(OptionContract(values, years, cfg.price.alpha, None, name))
    return out


def _price_all(cfg: RunConfig):
    """Price every scenario contract; returns [(scenario, [reports])]."""
    pc = cfg.price
    table = load_seasonal(cfg.path(pc.seasonal))
    scens = scenarios(cfg)
    n_contracts = sum(len(s.indexes) for s in scens)
    seeds = iter(contract_seeds(pc.seed, n_contracts))
    out = []
    for scen in scens:
        reps = []
        for contract in _contracts(cfg, table, scen):
            seed = next(seeds)
            if pc.method == "hba":
                reps.append(hba_price(contract, pc.detrend))
            else:
                reps.append(im_price(contract, tuple(pc.families), pc.n_sims, seed, pc.detrend))
        out.append((scen, reps))
    return out


def cmd_price(cfg: RunConfig) -> int:
    validate(cfg, ("price",))
    pc = cfg.price
    out = cfg.out / "price"
    written, comparisons = [], []
    for scen, reps in _price_all(cfg):
        for rep in reps:
            d = out / rep.name
            doc = rep.to_dict()
            doc["method"] = pc.method
            if pc.method == "im":
                doc["fair_price_hba"] = None
            atomic_write_text(d / "pricing_report.json", json.dumps(doc, indent=2) + "\n")
            write_payoffs(rep, d / "payoffs.csv")
            written += [d / "pricing_report.json", d / "payoffs.csv"]
            if rep.payoffs_im is not None:
                write_simulated_payoffs(rep, d / "simulated_payoffs.csv")
                written.append(d / "simulated_payoffs.csv")
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                cmp_ = compare_payoffs(reps[i], reps[j])
                row = [scen.name, reps[i].name, reps[j].name, cmp_.rho, cmp_.ad.statistic, cmp_.ad.p_value]
                row += [None, None] if cmp_.ad_im is None else [cmp_.ad_im.statistic, cmp_.ad_im.p_value]
                comparisons.append(row)
    lines = ["scenario,contract_a,contract_b,rho,ad_stat,ad_p,ad_im_stat,ad_im_p"]
    lines += [",".join("" if v is None else (repr(float(v)) if isinstance(v, float) else str(v)) for v in row)
              for row in comparisons]
    atomic_write_text(out / "comparisons.csv", "\n".join(lines) + "\n")
    written.append(out / "comparisons.csv")
    write_manifest(out, "price", cfg, [w for w in written if w.parent == out],
                   seeds={"run_seed": pc.seed, "derivation": "SeedSequence(seed).spawn(n_contracts)"},
                   contracts={str(w.relative_to(out)): _sha256(w) for w in written})
    return EXIT_OK


# ---------------------------------------------------------------------------
# plotdata

def cmd_plotdata(cfg: RunConfig) -> int:
    validate(cfg, ("predict", "price"))
    out = cfg.out / "plotdata"
    table = load_seasonal(cfg.path(cfg.predict.seasonal))
    region = cfg.plotdata.region or (cfg.predict.regions or table.regions())[0]
    if region not in table.regions():
        raise ConfigError(f"region {region!r} not in seasonal data")
    years = table.years(region)
    lines = ["model_id,label,pca_pc1,pca_pc2,pca_pc3,pca_pc4,pca_total,fpca_pc1,fpca_pc2,fpca_pc3,fpca_pc4,fpca_total"]
    for mid, spec in MODEL_SPECS.items():
        cells = []
        try:
            design = build_design_matrix(spec, table, region, years)
            for res in (pca(design), fpca(design, basis_size=cfg.predict.fpca_basis)):
                cells += [repr(float(v)) for v in res.explained_ratio] + [repr(res.explained_total)]
        except ClimRiskError as exc:
            log.warning("explained variance for model %d: %s", mid, exc)
            cells = [""] * 10
        lines.append(f"{mid},{spec.label}," + ",".join(cells))
    written = [out / "explained_variance.csv"]
    atomic_write_text(written[0], "\n".join(lines) + "\n")

    report = Path(cfg.plotdata.report) if cfg.plotdata.report else cfg.out / "predict" / "report.csv"
    if report.is_file():
        rows = [ln.split(",") for ln in report.read_text().splitlines()[1:]]
        bars = ["crop,region,model_id,method,reducer,mape_train,mape_test"]
        bars += [",".join(r[:5] + r[6:8]) for r in rows if r[5] == "pooled"]
        written.append(out / "mape_bars.csv")
        atomic_write_text(written[-1], "\n".join(bars) + "\n")
    else:
        log.warning("no prediction report at %s; skipping MAPE bars", report)

    pay = ["contract,year,payoff"]
    ec = ["contract,payoff,ecdf"]
    for _, reps in _price_all(cfg):
        for rep in reps:
            pay += [f"{rep.name},{int(y)},{float(v)!r}" for y, v in zip(rep.years, rep.payoffs_hba)]
            xs, fs = ecdf(rep.payoffs_hba)
            ec += [f"{rep.name},{float(x)!r},{float(f)!r}" for x, f in zip(xs, fs)]
    written += [out / "payoffs_by_year.csv", out / "payoff_ecdf.csv"]
    atomic_write_text(written[-2], "\n".join(pay) + "\n")
    atomic_write_text(written[-1], "\n".join(ec) + "\n")
    write_manifest(out, "plotdata", cfg, written, region=region)
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    validate(cfg)
    print(f"config OK (hash {cfg.digest()[:12]})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument handling

def _apply_overrides(cfg: RunConfig, args) -> None:
    cmd = args.command
    if cmd == "predict":
        p = cfg.predict
        for attr in ("crops", "regions", "models", "methods"):
            val = getattr(args, attr, None)
            if val:
                setattr(p, attr, val)
        if args.reducers:
            p.reducers = args.reducers
        if args.detrend:
            p.detrend = args.detrend
        if args.family:
            p.family = args.family
    elif cmd == "price":
        pc = cfg.price
        if args.index or args.region or args.season:
            if not (args.index and args.region and args.season):
                raise ConfigError("--index, --region and --season must be given together")
            pc.scenarios = [{"name": "cli", "region": args.region, "season": args.season, "indexes": args.index}]
        for attr in ("alpha", "method", "families", "seed", "detrend", "n_sims"):
            val = getattr(args, attr, None)
            if val is not None:
                setattr(pc, attr, val)
    if getattr(args, "jobs", None):
        cfg.jobs = args.jobs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="climrisk", description="Climate indexes, crop-yield models and weather-derivative pricing.",
        epilog="exit codes: 0 ok, 1 some cells failed, 2 config or input error")
    parser.add_argument("--version", action="version", version=f"climrisk {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="more logging (repeatable)")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="YAML run configuration")
    common.add_argument("--data-dir", help="directory for relative input paths (default: $CLIMRISK_DATA_DIR, "
                                           "then the bundled synthetic data)")
    common.add_argument("-o", "--output-dir", help="output directory")
    common.add_argument("--jobs", type=int, help="worker processes for independent cells")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("indices", parents=[common], help="seasonal CDD/HDD/PRE (and ACI parts) from daily weather")

    pr = sub.add_parser("predict", parents=[common], help="cross-validated yield models")
    pr.add_argument("--crops", nargs="+")
    pr.add_argument("--regions", nargs="+")
    pr.add_argument("--models", nargs="+", type=int)
    pr.add_argument("--methods", nargs="+")
    pr.add_argument("--reducers", nargs="+")
    pr.add_argument("--detrend", choices=("auto", "on", "off"))
    pr.add_argument("--family", choices=("table", "auto", "normal", "gamma"))

    pp = sub.add_parser("price", parents=[common], help="price call options on seasonal indexes")
    pp.add_argument("--index", action="append", help="index variable (repeatable)")
    pp.add_argument("--region")
    pp.add_argument("--season")
    pp.add_argument("--alpha", type=float)
    pp.add_argument("--method", choices=PRICE_METHODS)
    pp.add_argument("--families", nargs="+", choices=FAMILIES)
    pp.add_argument("--seed", type=int)
    pp.add_argument("--n-sims", dest="n_sims", type=int)
    pp.add_argument("--detrend", choices=("auto", "on", "off"))

    sub.add_parser("plotdata", parents=[common], help="plot-ready CSVs")
    sub.add_parser("validate-config", parents=[common], help="check a configuration and its input files")
    return parser


COMMANDS = {"indices": cmd_indices, "predict": cmd_predict, "price": cmd_price, "plotdata": cmd_plotdata,
            "validate-config": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.data_dir, args.output_dir)
        _apply_overrides(cfg, args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ClimRiskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
