import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def boost(i, phi):
    L = np.eye(4)
    L[0, 0] = L[i, i] = np.cosh(phi)
    L[0, i] = L[i, 0] = np.sinh(phi)
    return L


def rot(i, j, th):
    L = np.eye(4)
    L[i, i] = L[j, j] = np.cos(th)
    L[i, j] = -np.sin(th)
    L[j, i] = np.sin(th)
    return L
