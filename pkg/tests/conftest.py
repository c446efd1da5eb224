import os

import numpy as np
import pytest

from delaytau import BasisSpec, DelaySystem


@pytest.fixture
def rng():
    return np.random.default_rng(int(os.environ.get("DELAYTAU_SEED", "20240611")))


SYMMETRIC_SPECS = [BasisSpec.chebyshev1(1.0), BasisSpec.chebyshev2(1.0), BasisSpec.legendre(1.0)]
ALL_SPECS = SYMMETRIC_SPECS + [BasisSpec.jacobi(-0.5, -0.75, 1.0), BasisSpec.jacobi(0.5, 1.5, 2.0)]


def two_state_system():
    return DelaySystem([[-2, 1], [3, -8]], [[-1, -1], [-1, -1]], np.eye(2), np.eye(2), 1.0)


def hayes_system(a=-1.0, tau=1.0):
    return DelaySystem.scalar(a, a, tau)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
