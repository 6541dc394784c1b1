import numpy as np
import pytest

from isqfn.grid import make_grid
from isqfn.testbank import build_bank


@pytest.fixture(scope="session")
def g1():
    return make_grid(1, 4.0, 512)


@pytest.fixture(scope="session")
def g64():
    return make_grid(1, 4.0, 64)


@pytest.fixture(scope="session")
def bank6():
    return build_bank(0.5, size=6)


@pytest.fixture(scope="session")
def bank12():
    return build_bank(0.5, size=12)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running scenario experiments")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
