import warnings

import numpy as np
import pytest

from lametrans.geometry import BoundaryGrid, make_curve
from lametrans.material import ContrastPair, InadmissibleContrastWarning, LameParams


def pair_quiet(lam0, mu0, lam, mu):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InadmissibleContrastWarning)
        return ContrastPair.make(lam0, mu0, lam, mu)


@pytest.fixture
def p0():
    return LameParams(0.5, 0.5)


@pytest.fixture
def ellipse256():
    return BoundaryGrid(make_curve("ellipse", 1.0, 0.6), 256)


@pytest.fixture
def circle128():
    return BoundaryGrid(make_curve("circle", 1.0), 128)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    lines = [
        value
        for reports in terminalreporter.stats.values()
        for rep in reports
        if getattr(rep, "when", None) == "call"
        for name, value in getattr(rep, "user_properties", ())
        if name == "acceptance"
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip("."))):
            terminalreporter.write_line(line)
