import numpy as np
import pytest

from lampbot import default_chain


@pytest.fixture(scope="session")
def chain():
    return default_chain()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_joint_vectors(chain, rng, count):
    lo = chain.lower_limits
    hi = chain.upper_limits
    return lo + rng.random((count, chain.dof)) * (hi - lo)
