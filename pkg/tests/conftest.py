import random

import pytest

from mmvc.algebra import get_group


@pytest.fixture
def toy():
    return get_group("toy")


@pytest.fixture
def prod():
    return get_group("production")


@pytest.fixture
def rng():
    return random.Random(1234)


def brute_subgroup(modulus=607, order=101, root=3):
    """Subgroup members by repeated multiplication, independent of the group class."""
    g = 1
    for _ in range((modulus - 1) // order):
        g = g * root % modulus
    seen, h = [], 1
    for _ in range(order):
        seen.append(h)
        h = h * g % modulus
    return g, sorted(seen)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
