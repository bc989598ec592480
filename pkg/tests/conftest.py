import random

import pytest
from hypothesis import HealthCheck, settings

from ffmoments.algebra import Polynomial

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# Filled by tests/test_acceptance.py; printed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_poly(rng: random.Random, q: int, max_degree: int) -> Polynomial:
    deg = rng.randint(-1, max_degree)
    return Polynomial([rng.randrange(q) for _ in range(deg + 1)], q)


@pytest.fixture
def rng():
    return random.Random(20240611)


def P(text: str, q: int = 2) -> Polynomial:
    return Polynomial.parse(text, q)
