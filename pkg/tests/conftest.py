import numpy as np
import pytest

from speclab.eigenbasis import BoundaryCondition, DomainSpec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def disk():
    return DomainSpec.disk()


@pytest.fixture
def torus():
    return DomainSpec.torus(2)


@pytest.fixture
def square():
    return DomainSpec.rectangle()


@pytest.fixture
def dirichlet():
    return BoundaryCondition.DIRICHLET


@pytest.fixture
def neumann():
    return BoundaryCondition.NEUMANN
