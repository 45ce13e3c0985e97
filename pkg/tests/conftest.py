import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cachenoma.model import ChannelState

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def fig3_channel():
    return ChannelState(1e-3, 1e-2, 10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
