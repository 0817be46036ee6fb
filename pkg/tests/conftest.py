import math

import numpy as np
import pytest

from harmocont.geometry import PaperAffine, QuadraticCurve, SourceCircle, sample_arc
from harmocont.potential import assemble

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ref_source():
    return SourceCircle((0.0, 0.0), 1.1, 40)


@pytest.fixture(scope="session")
def ref_rule():
    return PaperAffine(-0.5, 0.35 * math.pi)


@pytest.fixture(scope="session")
def parabola():
    return QuadraticCurve.parabola(-0.5, 2.0, -0.5, 0.6)


@pytest.fixture(scope="session")
def hyperbola():
    return QuadraticCurve.hyperbola(0.5, 0.6, -0.5, 0.6)


@pytest.fixture(scope="session")
def parabola_sampling(parabola, ref_rule):
    return sample_arc(parabola, 180, ref_rule)


@pytest.fixture(scope="session")
def parabola_K(parabola_sampling, ref_source):
    return assemble(parabola_sampling, ref_source)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
