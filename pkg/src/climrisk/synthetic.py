"""Seeded synthetic datasets bundled with the package.

* a 64-year (1961-2024) seasonal index table and crop yields for two regions;
* a two-state, three-year daily weather set with piecewise-constant monthly
  temperatures, small enough to check degree-day totals by hand.
"""
from __future__ import annotations

import datetime as dt
from pathlib import Path

import numpy as np

from .indices import composite_aci
from .ingest import (CROPS, SEASONS, DailyWeatherRecord, SeasonalObservation, SeasonalTable, YieldRecord,
                     atomic_write_text, write_daily_weather, write_seasonal, write_yields)

DATA_DIR = Path(__file__).resolve().parent / "data"
SYNTH_SEED = 20240601
SYNTH_YEARS = (1961, 2024)
SYNTH_REGIONS = ("NORTH", "SOUTH")
DAILY_STATES = ("AA", "BB")
DAILY_REGION = "EAST"
DAILY_YEARS = (2001, 2003)

# (mean, sd) per season for the raw seasonal indexes
_RAW = {
    "CDD": {"winter": (25.0, 12.0), "spring": (320.0, 80.0), "summer": (1500.0, 180.0), "autumn": (420.0, 90.0)},
    "HDD": {"winter": (2500.0, 280.0), "spring": (900.0, 140.0), "summer": (35.0, 15.0), "autumn": (1100.0, 150.0)},
    "PRE": {"winter": (180.0, 50.0), "spring": (260.0, 70.0), "summer": (240.0, 80.0), "autumn": (200.0, 60.0)},
}
# linear drift per year of the standardized ACI components
_DRIFT = {"T90": 0.02, "T10": -0.02, "P": 0.005, "D": 0.0, "W": 0.0, "S": -0.005}
_CROP_BASE = {"corn": (70.0, 1.6, 7.0), "wheat": (28.0, 0.45, 2.5), "soybeans": (24.0, 0.4, 2.2)}


def _gamma_like(rng, mean, sd, size):
    shape = (mean / sd) ** 2
    return rng.gamma(shape, mean / shape, size)


def _ar1(rng, n, phi=0.3):
    e = rng.normal(size=n)
    out = np.empty(n)
    out[0] = e[0]
    for t in range(1, n):
        out[t] = phi * out[t - 1] + np.sqrt(1 - phi ** 2) * e[t]
    return out


def synthetic_seasonal(regions=SYNTH_REGIONS, years=SYNTH_YEARS, seed=SYNTH_SEED) -> SeasonalTable:
    rng = np.random.default_rng(seed)
    yrs = np.arange(years[0], years[1] + 1)
    t = yrs - yrs[0]
    rows = []
    for r_i, region in enumerate(regions):
        shift = 1.0 + 0.15 * r_i
        for var, seasons in _RAW.items():
            for season in SEASONS:
                mean, sd = seasons[season]
                vals = np.round(_gamma_like(rng, mean * shift, sd * shift, yrs.size), 2)
                rows += [SeasonalObservation(region, var, int(y), season, float(v)) for y, v in zip(yrs, vals)]
        comps = []
        for var, drift in _DRIFT.items():
            for season in SEASONS:
                vals = np.round(_ar1(rng, yrs.size) + drift * (t - 15), 4)
                comps += [SeasonalObservation(region, var, int(y), season, float(v)) for y, v in zip(yrs, vals)]
        rows += comps
        rows += list(composite_aci(comps))
    return SeasonalTable(rows)


def synthetic_yields(seasonal: SeasonalTable, crops=CROPS, seed=SYNTH_SEED + 1) -> list[YieldRecord]:
    """Trend plus a few climate effects plus noise; always positive."""
    rng = np.random.default_rng(seed)
    out = []
    for region in seasonal.regions():
        years, cdd = seasonal.series(region, "CDD", "summer")
        _, pre = seasonal.series(region, "PRE", "spring")
        _, t90 = seasonal.series(region, "T90", "summer")
        _, dry = seasonal.series(region, "D", "summer")
        z = lambda v: (v - v.mean()) / v.std()  # noqa: E731
        t = years - years[0]
        for crop in crops:
            base, slope, noise = _CROP_BASE[crop]
            signal = -0.08 * z(cdd) + 0.05 * z(pre) - 0.04 * z(t90) - 0.03 * z(dry) + 0.02 * z(cdd) ** 2
            y = (base + slope * t) * np.exp(signal) + rng.normal(0.0, noise, t.size)
            y = np.round(np.maximum(y, 0.2 * base), 1)
            out += [YieldRecord(crop, region, int(yr), float(v)) for yr, v in zip(years, y)]
    return sorted(out, key=lambda r: (CROPS.index(r.crop), r.region, r.year))


def daily_state_temps(state: str, month: int) -> tuple[float, float]:
    """Constant (tmax, tmin) for every day of ``month`` at ``state``."""
    offset = {"AA": 0.0, "BB": 6.0}[state]
    return 50.0 + 3.0 * month + offset, 30.0 + 3.0 * month + offset


def daily_state_rain(state: str, day: int) -> float:
    if state == "AA":
        return 2.5 if day % 4 == 0 else 0.0
    return 1.5 if day % 2 == 1 else 0.0


def synthetic_daily(state: str, years=DAILY_YEARS) -> list[DailyWeatherRecord]:
    out = []
    d = dt.date(years[0], 1, 1)
    end = dt.date(years[1], 12, 31)
    while d <= end:
        tmax, tmin = daily_state_temps(state, d.month)
        out.append(DailyWeatherRecord(d, tmax, tmin, daily_state_rain(state, d.day)))
        d += dt.timedelta(days=1)
    return out


def write_bundled(directory=DATA_DIR) -> None:
    """Regenerate every bundled dataset into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    seasonal = synthetic_seasonal()
    write_seasonal(seasonal, directory / "synthetic_seasonal.csv")
    write_yields(synthetic_yields(seasonal), directory / "synthetic_yields.csv")
    for state in DAILY_STATES:
        write_daily_weather(synthetic_daily(state), directory / f"daily_{state}.csv")
    atomic_write_text(directory / "daily_regions.csv",
                      "state,region\n" + "".join(f"{s},{DAILY_REGION}\n" for s in DAILY_STATES))


if __name__ == "__main__":  # pragma: no cover
    write_bundled()
