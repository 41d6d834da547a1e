import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mvnormtest import standardize

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def two_point():
    """d=1 residuals {-1, +1}, from the data {0, 2}."""
    return standardize(np.array([[0.0], [2.0]]))


def random_residuals(seed: int, n: int, d: int):
    return standardize(np.random.default_rng(seed).standard_normal((n, d)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
