import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from bbarma import ModelSpec, ParamVector  # noqa: E402


@pytest.fixture
def scenario1():
    return ModelSpec(p=1, q=0), ParamVector(1.0, [], [1.0], [], 20.0)


@pytest.fixture
def scenario2():
    return ModelSpec(p=1, q=1), ParamVector(0.2, [], [0.5], [0.3], 15.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
