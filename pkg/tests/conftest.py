import math

import numpy as np
import pytest
from hypothesis import strategies as st

from nctorus.algebra import DeformationMatrix


GENERIC_THETA = DeformationMatrix(1 / math.sqrt(2), (math.sqrt(5) - 1) / 2, 1 / math.pi)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def theta() -> DeformationMatrix:
    return GENERIC_THETA


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
