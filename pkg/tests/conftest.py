"""Common test fixtures and utilities."""
import random

import pytest

from src.matrix import Matrix, matrix_unit
from src.parser import parse_poly
from src.ring import RingSpec


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long exhaustive oracles (minutes)")


@pytest.fixture
def gf2():
    return RingSpec.gf(2)


@pytest.fixture
def gf3():
    return RingSpec.gf(3)


@pytest.fixture
def gf5():
    return RingSpec.gf(5)


@pytest.fixture
def gf7():
    return RingSpec.gf(7)


@pytest.fixture
def qq():
    return RingSpec.rational()


@pytest.fixture
def rng():
    """Seeded RNG so failures are reproducible."""
    return random.Random(20241016)


def random_matrix(rng, n, ring, lo=-5, hi=5):
    if ring.is_finite:
        return Matrix.from_rows([[rng.randrange(ring.modulus) for _ in range(n)] for _ in range(n)], ring)
    return Matrix.from_rows([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)], ring)


def random_trace_zero(rng, n, ring):
    A = random_matrix(rng, n, ring)
    fix = A.trace()
    return A - matrix_unit(n, n, n, ring).scale(fix)


def random_diagonal_sum_zero(rng, n, ring):
    """Every diagonal on or above the main one sums to zero (last entry absorbs the sum)."""
    A = random_matrix(rng, n, ring)
    rows = [list(r) for r in A.rows]
    for j in range(n):
        acc = sum(rows[i][i + j] for i in range(n - j - 1))
        rows[n - j - 1][n - 1] = ring.canon(-acc)
    return Matrix.from_rows(rows, ring)


@pytest.fixture
def matrices():
    """Factories for random test matrices."""

    class _Factory:
        random = staticmethod(random_matrix)
        trace_zero = staticmethod(random_trace_zero)
        diagonal_sum_zero = staticmethod(random_diagonal_sum_zero)

    return _Factory


@pytest.fixture
def poly():
    return parse_poly
