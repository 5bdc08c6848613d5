import math

import pytest

from heatbound.geometry import Domain, GridDiscretization, estimate_reach
from heatbound.operators import assemble_polyharmonic, spectral_decompose


@pytest.fixture(scope="session")
def disc():
    return Domain.disc(1.0)


@pytest.fixture(scope="session")
def annulus():
    return Domain.annulus(1.0, 2.0)


@pytest.fixture(scope="session")
def square():
    return Domain.square(2.0)


@pytest.fixture(scope="session")
def horseshoe():
    return Domain.horseshoe(1.0, 2.0, 0.3)


@pytest.fixture(scope="session")
def horseshoe_reach(horseshoe):
    return estimate_reach(horseshoe)


@pytest.fixture(scope="session")
def interval_grid():
    return GridDiscretization.build(Domain.interval(0.0, math.pi), math.pi / 200)


@pytest.fixture(scope="session")
def interval_kernel(interval_grid):
    return spectral_decompose(assemble_polyharmonic(interval_grid, 1))
