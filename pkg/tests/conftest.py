import numpy as np
import pytest

from loglap import Params
from loglap.grid import TableSet, build_grid


@pytest.fixture(scope="session")
def params_1d():
    return Params(1, 0.5, 2.0)


@pytest.fixture(scope="session")
def domain_1d():
    return build_grid("interval", (0.0, 0.3), 0.003)


@pytest.fixture(scope="session")
def tables_1d(domain_1d, params_1d):
    return TableSet.assemble(domain_1d, params_1d)


@pytest.fixture(scope="session")
def domain_1d_coarse():
    return build_grid("interval", (0.0, 0.3), 0.006)


@pytest.fixture(scope="session")
def tables_1d_coarse(domain_1d_coarse, params_1d):
    return TableSet.assemble(domain_1d_coarse, params_1d)


@pytest.fixture(scope="session")
def params_disc():
    return Params(2, 0.4, 2.0)


@pytest.fixture(scope="session")
def domain_disc():
    return build_grid("disc", (0.0, 0.0, 0.15), 0.015)


@pytest.fixture(scope="session")
def tables_disc(domain_disc, params_disc):
    return TableSet.assemble(domain_disc, params_disc)


def random_values(rng, n):
    return rng.uniform(-1.0, 1.0, size=n)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
