import sys

import numpy as np
import pytest

from bnlab.curves import PlaneCurve
from bnlab.exact import QQ, MultiPoly
from bnlab.models import load_standard


@pytest.fixture(scope="session")
def standard():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_standard(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def quartic(standard):
    return standard("quartic_g3")


@pytest.fixture(scope="session")
def quintic_g4(standard):
    return standard("quintic_g4")


@pytest.fixture(scope="session")
def sextic_g6(standard):
    return standard("sextic_g6")


@pytest.fixture(scope="session")
def rational_cubic():
    """x0 x2^2 = x1^3 + x1 x0^2 + x0^3 over Q, i.e. y^2 = x^3 + x + 1."""
    F = MultiPoly(QQ, 3, {(1, 0, 2): 1, (0, 3, 0): -1, (2, 1, 0): -1, (3, 0, 0): -1})
    pts = [(1, 0, 1), (1, 0, -1), (0, 0, 1), (1, 72, 611), (1, 72, -611)]
    return PlaneCurve(QQ, F, (), rational_points=pts, name="rational_cubic")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
