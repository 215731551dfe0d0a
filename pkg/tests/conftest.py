import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture
def hand_z():
    """n=2, K=1, T=2 with y-x rows (1,3) and (3,1): mean (2,2)."""
    from funcmax import DifferenceMatrix

    return DifferenceMatrix.from_z(np.array([[[1.0, 3.0]], [[3.0, 1.0]]]))


def random_difference_matrix(rng, n=5, K=3, T=8, scale=1.0):
    from funcmax import DifferenceMatrix

    return DifferenceMatrix.from_z(scale * rng.standard_normal((n, K, T)))
