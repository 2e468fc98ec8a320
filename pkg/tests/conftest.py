import numpy as np
import pytest

from noisyevo.streams import spawn_rng


@pytest.fixture
def rng() -> np.random.Generator:
    return spawn_rng(20240811, 0, "tests")
