"""Weather-based indexes (CDD, HDD, PRE) and ACI-style standardized anomalies."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DataError
from .ingest import (
    SEASON_MONTHS,
    DailyWeather,
    MonthlyObservation,
    SeasonalObservation,
    SeasonalTable,
    season_of,
)

BASE_F = 65.0
BASE_C = 18.0
REFERENCE_YEARS = (1961, 1990)
ACI_COMPONENTS = ("T90", "T10", "P", "D", "W", "S")


def daily_mean_temp(tmax, tmin):
    """Daily average temperature, (tmax + tmin) / 2."""
    tmax = np.asarray(tmax, dtype=float)
    tmin = np.asarray(tmin, dtype=float)
    if np.any(tmax < tmin):
        raise DataError("tmax < tmin")
    out = (tmax + tmin) / 2.0
    return float(out) if out.ndim == 0 else out


def daily_cdd(t_mean, base=BASE_F):
    out = np.maximum(np.asarray(t_mean, dtype=float) - base, 0.0)
    return float(out) if out.ndim == 0 else out


def daily_hdd(t_mean, base=BASE_F):
    out = np.maximum(base - np.asarray(t_mean, dtype=float), 0.0)
    return float(out) if out.ndim == 0 else out


def accumulate_pre(daily_rain, window: int | None = None) -> float:
    """Total rainfall over a window of ``window`` days (defaults to the input length)."""
    rain = np.asarray(daily_rain, dtype=float).ravel()
    if window is not None and rain.size != window:
        raise DataError(f"expected {window} daily values, got {rain.size}")
    if np.any(np.isnan(rain)):
        raise DataError("missing rainfall value in window")
    if np.any(rain < 0):
        raise DataError("negative rainfall")
    return math.fsum(rain.tolist())


# ---------------------------------------------------------------------------
# standardization

@dataclass(frozen=True)
class ReferenceStats:
    variable: str
    period_key: object  # season name or month number
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DataError(f"reference sigma must be positive for {self.variable}/{self.period_key}")


def _period_key(obs):
    return obs.season if isinstance(obs, SeasonalObservation) else obs.month


def reference_stats(observations: Iterable, years=REFERENCE_YEARS, ddof: int = 1) -> dict:
    """Per (variable, period) mean and standard deviation over the reference years."""
    lo, hi = years
    groups = defaultdict(list)
    for obs in observations:
        if lo <= obs.year <= hi:
            groups[(obs.variable, _period_key(obs))].append(obs.value)
    stats = {}
    for key, values in groups.items():
        v = np.asarray(values, dtype=float)
        if v.size <= ddof:
            raise DataError(f"too few reference values for {key}")
        stats[key] = ReferenceStats(key[0], key[1], float(v.mean()), float(v.std(ddof=ddof)))
    return stats


def standardize_component(raw: Iterable, ref: Mapping) -> list:
    """Convert raw observations to anomalies, ``(value - mu) / sigma``.

    Each observation is matched with the reference entry of its own variable and
    period (month for monthly rows, season for seasonal rows).
    """
    out = []
    for obs in raw:
        key = (obs.variable, _period_key(obs))
        try:
            st = ref[key]
        except KeyError:
            raise DataError(f"no reference statistics for {key}") from None
        if not st.sigma > 0:
            raise DataError(f"non-positive sigma for {key}")
        z = (obs.value - st.mu) / st.sigma
        if isinstance(obs, SeasonalObservation):
            out.append(SeasonalObservation(obs.region, obs.variable, obs.year, obs.season, z))
        else:
            out.append(MonthlyObservation(obs.region, obs.variable, obs.year, obs.month, z))
    return out


def composite_aci(anoms) -> SeasonalTable:
    """Average the six standardized components, with T10 entering negatively.

    ``anoms`` is a :class:`SeasonalTable` (or iterable of seasonal rows) holding
    T90, T10, P, D, W and S for the same (region, year, season) periods.
    """
    periods = defaultdict(dict)
    for obs in anoms:
        if obs.variable in ACI_COMPONENTS:
            periods[(obs.region, obs.year, obs.season)][obs.variable] = obs.value
    if not periods:
        raise DataError("no ACI components supplied")
    rows = []
    for (region, year, season), comp in periods.items():
        missing = [c for c in ACI_COMPONENTS if c not in comp]
        if missing:
            raise DataError(f"components {missing} missing for {region} {season} {year}")
        value = (comp["T90"] - comp["T10"] + comp["P"] + comp["D"] + comp["W"] + comp["S"]) / 6.0
        rows.append(SeasonalObservation(region, "ACI", year, season, value))
    return SeasonalTable(rows)


# ---------------------------------------------------------------------------
# daily -> monthly

def _complete_months(dates: np.ndarray):
    """Yield (year, month, index slice) for every calendar month fully covered by ``dates``."""
    months = dates.astype("datetime64[M]")
    uniq, start = np.unique(months, return_index=True)
    bounds = list(start) + [len(dates)]
    for m, a, b in zip(uniq, bounds[:-1], bounds[1:]):
        ndays = int(((m + 1).astype("datetime64[D]") - m.astype("datetime64[D]")).astype(int))
        if b - a == ndays:
            y = int(str(m)[:4])
            yield y, int(str(m)[5:7]), slice(a, b)


def daily_to_monthly(weather: DailyWeather, region: str, base: float = BASE_F) -> list[MonthlyObservation]:
    """Monthly CDD, HDD and PRE sums for every complete calendar month.

    PRE is emitted only for months whose rainfall is fully reported.
    """
    dates, tmax, tmin, rain = weather.arrays()
    tmean = daily_mean_temp(tmax, tmin)
    cdd = daily_cdd(tmean, base)
    hdd = daily_hdd(tmean, base)
    out = []
    for year, month, sl in _complete_months(dates):
        out.append(MonthlyObservation(region, "CDD", year, month, math.fsum(cdd[sl].tolist())))
        out.append(MonthlyObservation(region, "HDD", year, month, math.fsum(hdd[sl].tolist())))
        r = rain[sl]
        if not np.any(np.isnan(r)):
            out.append(MonthlyObservation(region, "PRE", year, month, accumulate_pre(r)))
    return out


def rx5day(daily_rain) -> float:
    """Largest five-consecutive-day rainfall total inside one month's values."""
    r = np.asarray(daily_rain, dtype=float)
    if r.size < 5:
        raise DataError("Rx5day needs at least five days")
    csum = np.concatenate(([0.0], np.cumsum(r)))
    return float(np.max(csum[5:] - csum[:-5]))


def _calendar_day(dates):
    md = np.array([(int(str(d)[5:7]), int(str(d)[8:10])) for d in dates])
    # Feb 29 shares the Feb 28 climatology
    leap = (md[:, 0] == 2) & (md[:, 1] == 29)
    md[leap, 1] = 28
    return md[:, 0] * 100 + md[:, 1]


def extreme_temperature_monthly(weather: DailyWeather, region: str, years=REFERENCE_YEARS):
    """Monthly T90 / T10 raw values (percent of days) and Rx5day.

    Percentile thresholds are taken per calendar day across the reference
    years; a day counts as warm when ``t >= p90`` and cold when ``t <= p10``.
    Rx5day windows are confined to the month.
    """
    dates, tmax, tmin, rain = weather.arrays()
    tmean = daily_mean_temp(tmax, tmin)
    cal = _calendar_day(dates)
    yrs = dates.astype("datetime64[Y]").astype(int) + 1970
    ref = (yrs >= years[0]) & (yrs <= years[1])
    if not ref.any():
        raise DataError("no daily data inside the reference window")
    p90 = {}
    p10 = {}
    for day in np.unique(cal[ref]):
        vals = tmean[ref & (cal == day)]
        p90[day] = np.percentile(vals, 90)
        p10[day] = np.percentile(vals, 10)
    out = []
    for year, month, sl in _complete_months(dates):
        days = cal[sl]
        if any(d not in p90 for d in days):
            continue
        t = tmean[sl]
        hi = np.array([p90[d] for d in days])
        lo = np.array([p10[d] for d in days])
        out.append(MonthlyObservation(region, "T90", year, month, 100.0 * float(np.mean(t >= hi))))
        out.append(MonthlyObservation(region, "T10", year, month, 100.0 * float(np.mean(t <= lo))))
        r = rain[sl]
        if not np.any(np.isnan(r)):
            out.append(MonthlyObservation(region, "P", year, month, rx5day(r)))
    return out


def monthly_anomalies_to_seasonal(monthly_anoms: Iterable[MonthlyObservation]) -> SeasonalTable:
    """Season anomaly = mean of its three monthly anomalies (complete seasons only)."""
    buckets = defaultdict(dict)
    for obs in monthly_anoms:
        year, season = season_of(obs.year, obs.month)
        buckets[(obs.region, obs.variable, year, season)][obs.month] = obs.value
    rows = []
    for (region, var, year, season), months in buckets.items():
        order = SEASON_MONTHS[season]
        if all(m in months for m in order):
            rows.append(SeasonalObservation(region, var, year, season,
                                            math.fsum(months[m] for m in order) / 3.0))
    return SeasonalTable(rows)


def aci_components_from_daily(weather: DailyWeather, region: str, years=REFERENCE_YEARS) -> SeasonalTable:
    """Seasonal T90/T10/P anomalies computed from a station's daily record."""
    raw = extreme_temperature_monthly(weather, region, years)
    ref = reference_stats(raw, years)
    return monthly_anomalies_to_seasonal(standardize_component(raw, ref))
