"""Loading, validation and aggregation of the raw input tables.

File formats (all CSV with a header row):

* ``weather_daily.csv`` -- ``date,tmax_f,tmin_f,rain_mm`` (one file per station,
  ``rain_mm`` may be blank)
* ``index_monthly.csv`` -- ``region,variable,year,month,value``
* ``aci_seasonal.csv`` / ``index_seasonal.csv`` -- ``region,variable,year,season,value``
* ``yields.csv`` -- ``crop,region,year,yield_bu_acre``
* ``regions.csv`` -- ``state,region``

Seasons are meteorological three-month blocks ending in February, May, August
and November. The December-February block carries the year of its February.
"""
from __future__ import annotations

import csv
import datetime as dt
import logging
import math
import os
import tempfile
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DataError

log = logging.getLogger(__name__)

SEASONS = ("winter", "spring", "summer", "autumn")
VARIABLES = ("CDD", "HDD", "PRE", "T90", "T10", "P", "D", "W", "S", "ACI")
CROPS = ("corn", "wheat", "soybeans")

# month -> (season, year offset of the season label)
_MONTH_SEASON = {
    12: ("winter", 1), 1: ("winter", 0), 2: ("winter", 0),
    3: ("spring", 0), 4: ("spring", 0), 5: ("spring", 0),
    6: ("summer", 0), 7: ("summer", 0), 8: ("summer", 0),
    9: ("autumn", 0), 10: ("autumn", 0), 11: ("autumn", 0),
}
SEASON_MONTHS = {"winter": (12, 1, 2), "spring": (3, 4, 5), "summer": (6, 7, 8), "autumn": (9, 10, 11)}


def season_of(year: int, month: int) -> tuple[int, str]:
    """Return the (season year, season name) a calendar month belongs to."""
    season, offset = _MONTH_SEASON[month]
    return year + offset, season


@dataclass(frozen=True)
class DailyWeatherRecord:
    date: dt.date
    tmax: float
    tmin: float
    rain: float | None = None


@dataclass(frozen=True)
class MonthlyObservation:
    region: str
    variable: str
    year: int
    month: int
    value: float


@dataclass(frozen=True)
class SeasonalObservation:
    region: str
    variable: str
    year: int
    season: str
    value: float


@dataclass(frozen=True)
class YieldRecord:
    crop: str
    region: str
    year: int
    yield_bu_acre: float


@dataclass(frozen=True)
class SeasonGap:
    region: str
    variable: str
    year: int
    season: str
    missing_months: tuple[int, ...]


@dataclass(frozen=True)
class DailyWeather:
    """Parsed station file. ``rejected`` counts rows dropped for tmax < tmin."""

    records: tuple[DailyWeatherRecord, ...]
    rejected: int = 0

    def __len__(self):
        return len(self.records)

    def arrays(self):
        """Columns as numpy arrays: dates, tmax, tmin, rain (NaN where absent)."""
        dates = np.array([r.date for r in self.records], dtype="datetime64[D]")
        tmax = np.array([r.tmax for r in self.records], dtype=float)
        tmin = np.array([r.tmin for r in self.records], dtype=float)
        rain = np.array([np.nan if r.rain is None else r.rain for r in self.records], dtype=float)
        return dates, tmax, tmin, rain


class SeasonalTable:
    """Immutable set of seasonal observations keyed by (region, variable, year, season)."""

    def __init__(self, rows: Iterable[SeasonalObservation]):
        index = {}
        for row in rows:
            if row.season not in SEASONS:
                raise DataError(f"unknown season {row.season!r}")
            if row.variable not in VARIABLES:
                raise DataError(f"unknown variable {row.variable!r}")
            key = (row.region, row.variable, row.year, row.season)
            if key in index:
                raise DataError(f"duplicate observation {key}")
            index[key] = row
        self._index = index
        self._rows = tuple(sorted(index.values(), key=_seasonal_sort_key))

    @property
    def rows(self) -> tuple[SeasonalObservation, ...]:
        return self._rows

    def __len__(self):
        return len(self._rows)

    def __iter__(self):
        return iter(self._rows)

    def __eq__(self, other):
        return isinstance(other, SeasonalTable) and self._rows == other._rows

    def __contains__(self, key):
        return key in self._index

    def get(self, region: str, variable: str, year: int, season: str) -> float:
        try:
            return self._index[(region, variable, year, season)].value
        except KeyError:
            raise DataError(f"missing cell region={region} variable={variable} "
                            f"year={year} season={season}") from None

    def regions(self) -> list[str]:
        return sorted({r.region for r in self._rows})

    def variables(self, region: str | None = None) -> list[str]:
        found = {r.variable for r in self._rows if region is None or r.region == region}
        return [v for v in VARIABLES if v in found]

    def years(self, region: str | None = None, variable: str | None = None) -> list[int]:
        return sorted({r.year for r in self._rows
                       if (region is None or r.region == region)
                       and (variable is None or r.variable == variable)})

    def series(self, region: str, variable: str, season: str):
        """Years and values of one (region, variable, season) series, in year order."""
        rows = [r for r in self._rows
                if r.region == region and r.variable == variable and r.season == season]
        years = np.array([r.year for r in rows], dtype=int)
        values = np.array([r.value for r in rows], dtype=float)
        return years, values

    def merge(self, other: "SeasonalTable") -> "SeasonalTable":
        return SeasonalTable(self._rows + other.rows)


def _seasonal_sort_key(row: SeasonalObservation):
    return (row.region, VARIABLES.index(row.variable), row.year, SEASONS.index(row.season))


# ---------------------------------------------------------------------------
# readers

def _read_rows(path, expected_header: Sequence[str]):
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: file not found")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: no records") from None
        header = [h.strip() for h in header]
        if header != list(expected_header):
            raise DataError(f"{path}: header {header} does not match {list(expected_header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected_header):
                raise DataError(f"{path}:{lineno}: expected {len(expected_header)} fields, got {len(row)}")
            yield lineno, [c.strip() for c in row]


def load_daily_weather(path) -> DailyWeather:
    """Parse one station's daily file.

    Rows with tmax < tmin are dropped and counted; anything unparseable raises
    :class:`DataError` naming the line.
    """
    records = []
    rejected = 0
    prev = None
    for lineno, (d, tmax, tmin, rain) in _read_rows(path, ("date", "tmax_f", "tmin_f", "rain_mm")):
        try:
            date = dt.date.fromisoformat(d)
            hi, lo = float(tmax), float(tmin)
            r = float(rain) if rain else None
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: malformed row ({exc})") from None
        if not (math.isfinite(hi) and math.isfinite(lo)) or (r is not None and not math.isfinite(r)):
            raise DataError(f"{path}:{lineno}: non-finite value")
        if r is not None and r < 0:
            raise DataError(f"{path}:{lineno}: negative rainfall {r}")
        if prev is not None and date <= prev:
            raise DataError(f"{path}:{lineno}: date {date} not after {prev}")
        prev = date
        if hi < lo:
            rejected += 1
            continue
        records.append(DailyWeatherRecord(date, hi, lo, r))
    if rejected:
        log.warning("%s: rejected %d rows with tmax < tmin", path, rejected)
    if not records:
        raise DataError(f"{path}: no records")
    return DailyWeather(tuple(records), rejected)


def _parse_int(value, path, lineno, what):
    try:
        return int(value)
    except ValueError:
        raise DataError(f"{path}:{lineno}: bad {what} {value!r}") from None


def _parse_float(value, path, lineno, what):
    try:
        out = float(value)
    except ValueError:
        raise DataError(f"{path}:{lineno}: bad {what} {value!r}") from None
    if not math.isfinite(out):
        raise DataError(f"{path}:{lineno}: non-finite {what}")
    return out


def load_monthly(path) -> list[MonthlyObservation]:
    out = []
    for lineno, (region, var, year, month, value) in _read_rows(
            path, ("region", "variable", "year", "month", "value")):
        m = _parse_int(month, path, lineno, "month")
        if not 1 <= m <= 12:
            raise DataError(f"{path}:{lineno}: month {m} out of range")
        if var not in VARIABLES:
            raise DataError(f"{path}:{lineno}: unknown variable {var!r}")
        out.append(MonthlyObservation(region, var, _parse_int(year, path, lineno, "year"), m,
                                      _parse_float(value, path, lineno, "value")))
    if not out:
        raise DataError(f"{path}: no records")
    return out


def load_seasonal(path) -> SeasonalTable:
    rows = []
    for lineno, (region, var, year, season, value) in _read_rows(
            path, ("region", "variable", "year", "season", "value")):
        if season not in SEASONS:
            raise DataError(f"{path}:{lineno}: unknown season {season!r}")
        if var not in VARIABLES:
            raise DataError(f"{path}:{lineno}: unknown variable {var!r}")
        rows.append(SeasonalObservation(region, var, _parse_int(year, path, lineno, "year"), season,
                                        _parse_float(value, path, lineno, "value")))
    if not rows:
        raise DataError(f"{path}: no records")
    return SeasonalTable(rows)


def load_yields(path) -> list[YieldRecord]:
    out = []
    seen = set()
    for lineno, (crop, region, year, value) in _read_rows(
            path, ("crop", "region", "year", "yield_bu_acre")):
        if crop not in CROPS:
            raise DataError(f"{path}:{lineno}: unknown crop {crop!r}")
        y = _parse_float(value, path, lineno, "yield")
        if y <= 0:
            raise DataError(f"{path}:{lineno}: yield must be positive, got {y}")
        rec = YieldRecord(crop, region, _parse_int(year, path, lineno, "year"), y)
        key = (rec.crop, rec.region, rec.year)
        if key in seen:
            raise DataError(f"{path}:{lineno}: duplicate yield record {key}")
        seen.add(key)
        out.append(rec)
    if not out:
        raise DataError(f"{path}: no records")
    return sorted(out, key=lambda r: (CROPS.index(r.crop), r.region, r.year))


def load_regions(path) -> dict[str, str]:
    mapping = {}
    for lineno, (state, region) in _read_rows(path, ("state", "region")):
        if state in mapping and mapping[state] != region:
            raise ConfigError(f"{path}:{lineno}: state {state} mapped twice")
        mapping[state] = region
    if not mapping:
        raise DataError(f"{path}: no records")
    return mapping


def yield_series(records: Iterable[YieldRecord], crop: str, region: str):
    rows = sorted((r for r in records if r.crop == crop and r.region == region), key=lambda r: r.year)
    if not rows:
        raise DataError(f"no yields for crop={crop} region={region}")
    return (np.array([r.year for r in rows], dtype=int),
            np.array([r.yield_bu_acre for r in rows], dtype=float))


# ---------------------------------------------------------------------------
# writers

def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory + rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
        # mkstemp creates 0600 files; use the usual umask-derived mode instead
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def write_seasonal(table: SeasonalTable, path) -> None:
    atomic_write_text(path, _csv_text(
        ("region", "variable", "year", "season", "value"),
        ((r.region, r.variable, r.year, r.season, float(r.value)) for r in table)))


def write_monthly(rows: Iterable[MonthlyObservation], path) -> None:
    rows = sorted(rows, key=lambda r: (r.region, VARIABLES.index(r.variable), r.year, r.month))
    atomic_write_text(path, _csv_text(
        ("region", "variable", "year", "month", "value"),
        ((r.region, r.variable, r.year, r.month, float(r.value)) for r in rows)))


def write_yields(records: Iterable[YieldRecord], path) -> None:
    atomic_write_text(path, _csv_text(
        ("crop", "region", "year", "yield_bu_acre"),
        ((r.crop, r.region, r.year, float(r.yield_bu_acre)) for r in records)))


def write_daily_weather(records: Iterable[DailyWeatherRecord], path) -> None:
    def fmt(r):
        return (r.date.isoformat(), repr(float(r.tmax)), repr(float(r.tmin)),
                "" if r.rain is None else repr(float(r.rain)))
    atomic_write_text(path, _csv_text(("date", "tmax_f", "tmin_f", "rain_mm"), map(fmt, records)))


# ---------------------------------------------------------------------------
# aggregation

def monthly_to_seasonal(monthly: Iterable[MonthlyObservation]) -> tuple[SeasonalTable, list[SeasonGap]]:
    """Sum monthly values into meteorological seasons.

    A season is emitted only when all three of its months are present; every
    incomplete season is listed in the returned gap report instead.
    """
    buckets: dict[tuple, dict[int, float]] = defaultdict(dict)
    for obs in monthly:
        year, season = season_of(obs.year, obs.month)
        months = buckets[(obs.region, obs.variable, year, season)]
        if obs.month in months:
            raise DataError(f"duplicate month {obs.year}-{obs.month:02d} for {obs.region}/{obs.variable}")
        months[obs.month] = obs.value
    rows, gaps = [], []
    for (region, var, year, season), months in buckets.items():
        expected = SEASON_MONTHS[season]
        missing = tuple(m for m in expected if m not in months)
        if missing:
            gaps.append(SeasonGap(region, var, year, season, missing))
            continue
        # fixed month order keeps the float sum reproducible
        rows.append(SeasonalObservation(region, var, year, season, math.fsum(months[m] for m in expected)))
    gaps.sort(key=lambda g: (g.region, VARIABLES.index(g.variable), g.year, SEASONS.index(g.season)))
    return SeasonalTable(rows), gaps


def aggregate_states_to_region(state_rows, mapping: dict[str, str]):
    """Unweighted mean over the states of each region.

    Accepts a sequence (or :class:`SeasonalTable`) of state-level
    :class:`SeasonalObservation` rows, or of :class:`YieldRecord` rows, where
    the ``region`` field holds the state code. Returns rows of the same kind.
    """
    rows = list(state_rows)
    if not rows:
        return SeasonalTable([]) if isinstance(state_rows, SeasonalTable) else []
    unmapped = sorted({r.region for r in rows if r.region not in mapping})
    if unmapped:
        raise ConfigError(f"states missing from region mapping: {', '.join(unmapped)}")
    groups = defaultdict(list)
    if isinstance(rows[0], SeasonalObservation):
        for r in rows:
            groups[(mapping[r.region], r.variable, r.year, r.season)].append(r.value)
        out = [SeasonalObservation(reg, var, year, season, math.fsum(v) / len(v))
               for (reg, var, year, season), v in groups.items()]
        return SeasonalTable(out)
    if isinstance(rows[0], YieldRecord):
        for r in rows:
            groups[(r.crop, mapping[r.region], r.year)].append(r.yield_bu_acre)
        out = [YieldRecord(crop, reg, year, math.fsum(v) / len(v)) for (crop, reg, year), v in groups.items()]
        return sorted(out, key=lambda r: (CROPS.index(r.crop), r.region, r.year))
    raise TypeError(f"cannot aggregate rows of type {type(rows[0]).__name__}")
