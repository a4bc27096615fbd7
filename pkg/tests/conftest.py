import numpy as np
import pytest

from hilbert.catalog import cyclic_group, modular_group, schottky_group, triangle_group
from hilbert.domains import Ellipsoid, PNormBall


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run acceptance-scale tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale runs, enabled with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def disk():
    return Ellipsoid.unit_ball(2)


@pytest.fixture
def pnorm_ball():
    return PNormBall(4.0, 1.0, 2)


@pytest.fixture
def flat_ellipse():
    return Ellipsoid(np.diag([1.0, 4.0]))


@pytest.fixture(scope="session")
def schottky():
    return schottky_group()


@pytest.fixture(scope="session")
def cyclic():
    return cyclic_group(1.0)


@pytest.fixture(scope="session")
def modular():
    return modular_group()


@pytest.fixture(scope="session")
def triangle():
    return triangle_group(2, 3, 7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
