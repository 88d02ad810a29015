"""Shared maps and streams for the test suite."""

import numpy as np
import pytest

from ruellelab import LattesParams, RationalMap, RandomStream


@pytest.fixture(scope="session")
def squaring():
    """R(z) = z^2."""
    return RationalMap([0.0, 0.0, 1.0], [1.0])


@pytest.fixture(scope="session")
def basilica():
    """R(z) = z^2 - 1 (superattracting 2-cycle 0 <-> -1)."""
    return RationalMap([-1.0, 0.0, 1.0], [1.0])


@pytest.fixture(scope="session")
def chebyshev():
    """g(w) = 3w^2 - 2w, the degree-2 Chebyshev-type map fixing 0, 1, inf."""
    return RationalMap([0.0, -2.0, 3.0], [1.0])


@pytest.fixture(scope="session")
def lemniscatic():
    """Duplication-map parameters (g2, g3) = (4, 0)."""
    return LattesParams(4.0, 0.0)


@pytest.fixture()
def rng():
    return RandomStream(20260823)


def random_points(seed, count, radius=3.0, avoid=(), min_dist=0.1):
    """Deterministic complex sample avoiding a list of bad points."""
    gen = RandomStream(seed).generator
    out = []
    while len(out) < count:
        z = (gen.random(4 * count) * 2 - 1) * radius \
            + 1j * (gen.random(4 * count) * 2 - 1) * radius
        if len(avoid):
            bad = np.asarray(list(avoid), dtype=complex)
            keep = np.min(np.abs(z[:, None] - bad[None, :]), axis=1) > min_dist
            z = z[keep]
        out.extend(z[: count - len(out)])
    return np.asarray(out[:count], dtype=complex)
