import numpy as np
import pytest

from birank.lattice import FreqGrid
from birank.meyer import MeyerCornerSpec, build_profile

A_DEFAULT = 1 / (64 * np.pi**2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def meyer_768():
    return build_profile(MeyerCornerSpec(a=A_DEFAULT, d=A_DEFAULT), FreqGrid(768))


@pytest.fixture(scope="session")
def meyer_small():
    return build_profile(MeyerCornerSpec(a=A_DEFAULT, d=2 * A_DEFAULT), FreqGrid(96))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
