import numpy as np
import pytest

from augustin import ChannelInstance


def random_instance(rng, M, N, zero_frac=0.0):
    rows = rng.standard_exponential((M, N))
    if zero_frac:
        rows[rng.random((M, N)) < zero_frac] = 0.0
        rows[np.arange(M), rng.integers(N, size=M)] += 1.0
    rows /= rows.sum(axis=1, keepdims=True)
    w = rng.standard_exponential(M)
    return ChannelInstance(w / w.sum(), rows)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def symmetric():
    """Noiseless binary channel with a uniform prior."""
    return ChannelInstance([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]])
