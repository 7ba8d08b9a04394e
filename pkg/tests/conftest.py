import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hilbert_dyn.geometry import Ellipsoid, HPolytope, Intersection, StandardSimplex

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def disk():
    return Ellipsoid([0.0, 0.0], np.eye(2))


@pytest.fixture
def square():
    return HPolytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1])


@pytest.fixture
def simplex2():
    return StandardSimplex(2)


@pytest.fixture
def simplex3():
    return StandardSimplex(3)


@pytest.fixture
def lens(disk):
    return Intersection([disk, HPolytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [0.8] * 4)])
