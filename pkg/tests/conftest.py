"""
Shared fixtures: seeded generators and the default rotation parameter.
"""

import math

import numpy as np
import pytest

from src.crossed_algebra import RotationParameter, Weight
from src.datasets import random_element


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def theta():
    return RotationParameter.golden()


@pytest.fixture
def weight():
    return Weight(math.e)


@pytest.fixture
def make_element(theta, weight):
    """Factory for seeded random elements."""
    def make(rng, support=3, degree=4, decay=True):
        return random_element(rng, theta, weight, support=support, degree=degree, decay=decay)
    return make
