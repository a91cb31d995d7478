import pytest
import numpy as np

from pipalter.instances.bases import PipInstance
from pipalter.instances.generators import standard_suite
from pipalter.instances.normalization import normalize


@pytest.fixture(scope='session')
def suite():
    """Returns the named instances of the standard suite for seed 0."""

    return standard_suite(seed=0)


@pytest.fixture(scope='session')
def normalized_suite(suite):
    """Returns (name, NormalizedInstance) pairs of the standard suite."""

    return [(name, normalize(inst)) for name, inst in suite]


@pytest.fixture(scope='session')
def small_random():
    """Returns 25 small random PIPs with integer-like widths in [2, 4]."""

    rng = np.random.default_rng(0)
    result = []
    for _ in range(25):
        n, m = rng.integers(3, 10), rng.integers(1, 5)
        A = rng.random((m, n)) * (rng.random((m, n)) < 0.7)
        A[rng.integers(0, m, size=n), np.arange(n)] = 1
        b = rng.uniform(2, 4, size=m)
        c = rng.random(n)
        result.append(PipInstance(A, b, c))
    return result
