import math

import pytest
from hypothesis import HealthCheck, settings

from curabeam import Cura1DGeometry, Cura2DGeometry

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

LAMBDA = 0.01
LAMBDA_30GHZ = 299792458.0 / 30e9


@pytest.fixture(scope="session")
def arc256():
    return Cura1DGeometry(256, math.pi / 6, LAMBDA)


@pytest.fixture(scope="session")
def arc64():
    return Cura1DGeometry(64, math.pi / 6, LAMBDA)


@pytest.fixture(scope="session")
def stacked():
    return Cura2DGeometry(Cura1DGeometry(64, math.pi / 6, LAMBDA_30GHZ), 8)


def pytest_terminal_summary(terminalreporter):
    from _report import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
