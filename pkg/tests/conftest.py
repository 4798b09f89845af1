import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("icg", deadline=None, max_examples=200, derandomize=True)
settings.load_profile("icg")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
