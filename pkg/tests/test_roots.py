"""Batched simultaneous root finding."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruellelab import RootSolveFailure
from ruellelab.roots import aberth, cluster_roots, polish


def _sorted(roots):
    return np.sort_complex(np.asarray(roots))


def _match_error(found, expect):
    # greedy multiset matching; robust to sort ties from 1e-18 jitter
    pool = list(np.asarray(found, dtype=complex))
    worst = 0.0
    for e in expect:
        i = int(np.argmin([abs(f - e) for f in pool]))
        worst = max(worst, abs(pool.pop(i) - e))
    return worst


def test_quadratic_closed_form():
    # (z - 2)(z + 3) = z^2 + z - 6
    r = _sorted(aberth([-6.0, 1.0, 1.0]))
    assert np.allclose(r, [-3.0, 2.0], atol=1e-12)


def test_quartic_roots_of_unity():
    r = aberth([-1.0, 0.0, 0.0, 0.0, 1.0])
    assert _match_error(r, [1, -1, 1j, -1j]) < 1e-10


def test_linear_and_degree_errors():
    assert np.allclose(aberth([3.0, -1.5]), [2.0])
    with pytest.raises(ValueError):
        aberth([1.0])
    with pytest.raises(RootSolveFailure):
        aberth([1.0, 2.0, 0.0])


def test_batched_fibers_match_scalar():
    rng = np.random.default_rng(0)
    batch = rng.normal(size=(50, 5)) + 1j * rng.normal(size=(50, 5))
    batch[:, -1] += 3.0  # keep the leading coefficient away from zero
    all_roots = aberth(batch)
    for c, r in zip(batch, all_roots):
        assert np.allclose(_sorted(r), _sorted(aberth(c)), atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3.0), min_size=2, max_size=6))
def test_polynomial_reconstruction(roots):
    # coefficients from the roots, then solve and compare as multisets
    coeffs = np.polynomial.polynomial.polyfromroots(roots)
    found = aberth(coeffs)
    sep = min(
        [abs(a - b) for i, a in enumerate(roots)
         for b in roots[i + 1:]] or [1.0])
    if sep < 1e-3:  # clustered roots are covered by cluster_roots
        return
    assert _match_error(found, roots) <= 1e-6


def test_polish_tightens_residual():
    coeffs = np.array([-6.0, 11.0, -6.0, 1.0], dtype=complex)  # roots 1,2,3
    rough = np.array([1.01, 1.98, 3.02], dtype=complex)
    refined = polish(coeffs[None, :], rough[None, :])[0]
    assert np.allclose(_sorted(refined), [1.0, 2.0, 3.0], atol=1e-9)


def test_cluster_roots_groups_multiplicity():
    pairs = cluster_roots(np.array([1.0, 1.0 + 1e-12, 5.0]), tol=1e-9)
    pairs.sort(key=lambda t: t[0].real)
    assert pairs[0][1] == 2 and abs(pairs[0][0] - 1.0) < 1e-9
    assert pairs[1] == (5.0, 1)
