import numpy as np
import pytest
from hypothesis import settings

from aheinstein.black_holes import conformal_infinity, make_black_hole
from aheinstein.fg_expansion import BoundaryMetric, geodesic_compactification
from aheinstein.tensor_core import hyperbolic_ball, hyperbolic_cusp

settings.register_profile("repro", derandomize=True, max_examples=40, deadline=None)
settings.load_profile("repro")

ACCEPTANCE_LINES = []


def _compact(bh):
    return geodesic_compactification(bh.metric, conformal_infinity(bh))


@pytest.fixture(scope="session")
def ball():
    return geodesic_compactification(hyperbolic_ball(4), BoundaryMetric.round_sphere(1.0))


@pytest.fixture(scope="session")
def cusp():
    gram = np.eye(3)
    return geodesic_compactification(hyperbolic_cusp(gram), BoundaryMetric.flat_torus(gram))


@pytest.fixture(scope="session")
def schwarzschild():
    return _compact(make_black_hole(4, 1, 1.0))


@pytest.fixture(scope="session")
def toral():
    return _compact(make_black_hole(4, 0, 1.0))


@pytest.fixture(scope="session")
def genus2():
    return _compact(make_black_hole(4, -1, 1.0))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
