import numpy as np
import pytest

from motion_translate.motion import MotionTrajectory


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_traj(values, rate_hz=100.0):
    return MotionTrajectory.from_values(np.asarray(values, dtype=float), rate_hz)


@pytest.fixture
def random_traj(rng):
    def build(n=50, scale=1.0):
        return make_traj(rng.normal(scale=scale, size=(n, 6)))
    return build
