import numpy as np
import pytest

from balltrack.sim import SimConfig


@pytest.fixture(scope="session")
def cfg():
    return SimConfig()


@pytest.fixture(scope="session")
def small_cfg():
    """Cheap configuration for IO / CLI style tests."""
    return SimConfig(frames_per_video=12, n_train=3, n_val=2, n_test=3)


@pytest.fixture
def rng_np():
    return np.random.default_rng(1234)
