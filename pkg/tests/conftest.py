import numpy as np
import pytest

from polyscat import corpus


@pytest.fixture
def triangle():
    return corpus.polygon("triangle")


@pytest.fixture
def square():
    return corpus.polygon("square")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
