import numpy as np
import pytest

from uavmec.channel import ChannelParams
from uavmec.scenario import FleetConfig, generate


@pytest.fixture
def params():
    return ChannelParams()


@pytest.fixture
def small_scenario():
    return generate(7, 6, FleetConfig(num_uavs=2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
