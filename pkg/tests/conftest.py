import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from conformalbt.benchmarks import benchmark_map, make_benchmark

settings.register_profile(
    "default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def heat50():
    return make_benchmark("heat", 50)


@pytest.fixture(scope="session")
def heat50_map():
    return benchmark_map("heat", 50)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_stable(rng, n, m=1, q=1, shift=0.5):
    """Random complex system whose poles have real part <= -shift."""
    from conformalbt.system import LtiSystem

    A = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(n)
    lam = np.linalg.eigvals(A)
    A = A - (lam.real.max() + shift) * np.eye(n)
    B = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    C = rng.standard_normal((q, n)) + 1j * rng.standard_normal((q, n))
    return LtiSystem(A, B, C)
