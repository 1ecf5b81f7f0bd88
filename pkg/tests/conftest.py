import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from climrisk.evaluation import DataBundle
from climrisk.ingest import load_seasonal, load_yields
from climrisk.synthetic import DATA_DIR

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

TESTS_DIR = Path(__file__).resolve().parent


@pytest.fixture(scope="session")
def bundled_seasonal():
    return load_seasonal(DATA_DIR / "synthetic_seasonal.csv")


@pytest.fixture(scope="session")
def bundled_yields():
    return load_yields(DATA_DIR / "synthetic_yields.csv")


@pytest.fixture(scope="session")
def bundle(bundled_seasonal, bundled_yields):
    return DataBundle(bundled_seasonal, tuple(bundled_yields))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def white_noise():
    return np.random.default_rng(7).normal(size=200)


@pytest.fixture
def random_walk():
    return np.cumsum(np.random.default_rng(7).normal(size=200))


def pytest_terminal_summary(terminalreporter):
    from _acceptance_log import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
