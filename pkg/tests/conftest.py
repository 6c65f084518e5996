import numpy as np
import pytest

from valgram.geometry import Polygon, regular_polygon, unit_square


@pytest.fixture
def square():
    return unit_square()


@pytest.fixture
def triangle():
    return Polygon([[0, 0], [1, 0], [0, 1]])


@pytest.fixture
def scalene():
    return Polygon([[0, 0], [1, 0], [0.3, 0.8]])


@pytest.fixture
def hexagon():
    return regular_polygon(6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
