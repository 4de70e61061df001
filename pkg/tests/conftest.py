import numpy as np
import pytest

from grasscrit import core


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_pair(n, k, seed):
    """Two independent random planes on the same Grassmannian."""
    ss = np.random.SeedSequence(seed).spawn(2)
    return core.random_plane(n, k, ss[0]), core.random_plane(n, k, ss[1])


def framed(plane):
    return core.complete_frame(plane)


def plane_from_columns(*cols):
    return core.make_plane(np.column_stack(cols))


def e_basis(n, i):
    v = np.zeros(n)
    v[i] = 1.0
    return v
