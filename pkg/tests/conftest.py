import numpy as np
import pytest

from isogrow.bjorling import builtin_bjorling, derive_cauchy_data, sample_initial_strip
from isogrow.growth import grow


@pytest.fixture(scope="session")
def cylinder_data():
    return builtin_bjorling("cylinder", r=1.0)


@pytest.fixture(scope="session")
def sphere_data():
    return builtin_bjorling("sphere_mercator", r=1.0)


@pytest.fixture(scope="session")
def cylinder_cauchy(cylinder_data):
    return derive_cauchy_data(cylinder_data)


@pytest.fixture(scope="session")
def sphere_cauchy(sphere_data):
    return derive_cauchy_data(sphere_data)


@pytest.fixture(scope="session")
def grown_cylinder(cylinder_data, cylinder_cauchy):
    strip = sample_initial_strip(cylinder_cauchy, cylinder_data, 0.1)
    return grow(strip, 0.3)


@pytest.fixture(scope="session")
def grown_sphere(sphere_data, sphere_cauchy):
    strip = sample_initial_strip(sphere_cauchy, sphere_data, 0.1)
    return grow(strip, 0.3)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
