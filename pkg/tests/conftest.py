import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def grid():
    from stargraph.geometry import GridSpec

    return GridSpec(cutoff=6.0, points_per_edge=513)


@pytest.fixture
def coarse_grid():
    from stargraph.geometry import GridSpec

    return GridSpec(cutoff=6.0, points_per_edge=129)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
