import numpy as np
import pytest

from frec.core import FunctionalSample, uniform_grid


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sample(rng, n, m, integer=False):
    if integer:
        values = rng.integers(-3, 4, size=(n, m)).astype(float)
    else:
        values = rng.standard_normal((n, m))
    return FunctionalSample(uniform_grid(m), values)
