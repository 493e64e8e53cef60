import pytest
from hypothesis import HealthCheck, settings

from stabsim.algorithms import AlgorithmSpec
from stabsim.topology import build_gk, build_line, build_lollipop, from_edges

settings.register_profile('stabsim', deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile('stabsim')


@pytest.fixture
def line2():
    return build_line(2)


@pytest.fixture
def line3():
    return build_line(3)


@pytest.fixture
def lollipop2():
    return build_lollipop(2)


@pytest.fixture
def lollipop3():
    return build_lollipop(3)


@pytest.fixture
def rab():
    """R-a-b, the HC slow line"""
    return from_edges(3, [(0, 1), (1, 2)], ['R', 'a', 'b'])


@pytest.fixture
def g1():
    return build_gk(1)


@pytest.fixture
def hc4():
    return AlgorithmSpec('HC', 4)

