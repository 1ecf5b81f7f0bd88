import numpy as np

from climrisk.ingest import load_seasonal, load_yields
from climrisk.synthetic import (DAILY_STATES, DATA_DIR, SYNTH_REGIONS, daily_state_temps, synthetic_daily,
                                write_bundled)


def test_bundled_files_regenerate_byte_identically(tmp_path):
    write_bundled(tmp_path)
    for p in sorted(DATA_DIR.glob("*.csv")):
        assert (tmp_path / p.name).read_bytes() == p.read_bytes(), p.name


def test_bundled_shapes(bundled_seasonal, bundled_yields):
    assert bundled_seasonal.regions() == list(SYNTH_REGIONS)
    assert len(bundled_yields) == 3 * len(SYNTH_REGIONS) * 64
    assert min(r.yield_bu_acre for r in bundled_yields) > 0
    assert len(bundled_seasonal) == len(SYNTH_REGIONS) * 10 * 4 * 64


def test_daily_set_is_piecewise_constant():
    for state in DAILY_STATES:
        recs = synthetic_daily(state)
        assert len(recs) == 365 * 3
        for r in recs[::17]:
            assert (r.tmax, r.tmin) == daily_state_temps(state, r.date.month)


def test_round_trip_through_loaders(tmp_path):
    write_bundled(tmp_path)
    a = load_seasonal(tmp_path / "synthetic_seasonal.csv")
    y = load_yields(tmp_path / "synthetic_yields.csv")
    assert len(a) > 0 and np.isfinite([r.value for r in a]).all() and len(y) > 0
