import numpy as np
import pytest

from rsubgrad.geometry import SPD, Sphere


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=["sphere", "spd"])
def manifold(request):
    return Sphere(200) if request.param == "sphere" else SPD(10)
