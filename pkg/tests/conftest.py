import numpy as np
import pytest

from matrixball import boundary
from matrixball.structure import spectral_param, structure_data


@pytest.fixture(scope="session")
def sd11():
    return structure_data(1, 1)


@pytest.fixture(scope="session")
def sd21():
    return structure_data(2, 1)


@pytest.fixture(scope="session")
def sd12():
    return structure_data(1, 2)


@pytest.fixture(scope="session")
def sp2(sd11):
    return spectral_param(2.0, sd11)


@pytest.fixture(scope="session")
def sphere6(sd11):
    return boundary.sphere_rule(sd11, level=6)


@pytest.fixture(scope="session")
def sphere8(sd11):
    return boundary.sphere_rule(sd11, level=8)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240819)
