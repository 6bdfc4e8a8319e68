import numpy as np
import pytest

from slhyper.gridfn import Grid


@pytest.fixture(scope="session")
def line():
    """The standard one-dimensional experiment grid."""
    return Grid(1, 12.0, 4097)


@pytest.fixture(scope="session")
def small_line():
    return Grid(1, 6.0, 601)


def x1(pts):
    return np.asarray(pts)[..., 0]
