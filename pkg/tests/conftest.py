import numpy as np
import pytest
from hypothesis import settings, strategies as st

from switchsim import qlinalg as la

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_state(seed, d=2, rank=None):
    return la.random_density_matrix(d, np.random.default_rng(seed), rank)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
