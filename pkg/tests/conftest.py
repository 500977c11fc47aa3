import math

import pytest

from wingmate.instance import from_points

ACCEPTANCE_LINES = []


def hexagon_points():
    return [(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)]


@pytest.fixture
def hexagon():
    return from_points(hexagon_points(), id="hexagon")


@pytest.fixture
def collinear6():
    return from_points([(float(x), 0.0) for x in range(6)], id="collinear")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
