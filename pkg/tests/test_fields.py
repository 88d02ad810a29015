"""Evaluable fields, gamma test functions, partial-fraction data."""

import numpy as np
import pytest

from ruellelab import Field, RationalField, gamma, gamma_field
from ruellelab.errors import ZeroFieldWarning
from ruellelab.fields import as_field, constant


def test_gamma_formula_value():
    # gamma with (0, 1, 2) at z = 3 -> 2/(3*2*1) = 1/3
    g = gamma(2.0)
    assert abs(g(np.array([3.0]))[0] - 1.0 / 3.0) < 1e-14
    # and the closed form v(v-1)/(z(z-1)(z-v)) at random points
    z = np.array([0.5 + 0.25j, -2.0, 4.0 + 1.0j])
    v = 2.0
    assert np.allclose(g(z), v * (v - 1) / (z * (z - 1) * (z - v)),
                       atol=1e-14)


def test_gamma_field_general_anchors_match_gamma():
    z = np.linspace(-2, 2, 9) + 0.7j
    assert np.allclose(gamma_field(0.0, 1.0, 2.0)(z), gamma(2.0)(z))


def test_gamma_degenerate_is_zero():
    with pytest.warns(ZeroFieldWarning):
        g = gamma(1.0)
    assert np.all(g(np.array([0.3, 2.0 + 1j])) == 0)


def test_gamma_residues():
    g = gamma(-1.0)  # 2/(z^3 - z) = 2/(z(z-1)(z+1))
    assert isinstance(g, RationalField)
    assert abs(g.residue_at(0.0) - (-2.0)) < 1e-14
    assert abs(g.residue_at(1.0) - 1.0) < 1e-14
    assert abs(g.residue_at(-1.0) - 1.0) < 1e-14
    # residues of a cubic-decay partial fraction sum to zero
    assert abs(np.sum(g.residues)) < 1e-14


def test_gamma_odd_symmetry():
    # gamma_{-1} = 2/(z^3 - z) is an odd function
    g = gamma(-1.0)
    z = np.array([0.3 + 0.2j, 2.0 - 1.0j, 5.0])
    assert np.allclose(g(-z), -g(z), atol=1e-14)


def test_rational_field_matches_sum():
    f = RationalField([0.0, 1.0j], [2.0, -2.0])
    z = np.array([3.0, 1.0 + 1.0j])
    assert np.allclose(f(z), 2.0 / z - 2.0 / (z - 1.0j))
    assert f.decay_order == 3
    with pytest.raises(ValueError):
        RationalField([0.0, 1.0], [1.0])


def test_field_algebra_metadata():
    a = Field(lambda z: z, decay_order=-1)
    b = gamma(2.0)
    s = a + b
    assert s.decay_order == -1
    p = a * b
    assert p.decay_order == 2
    assert set(p.poles) == set(b.poles)
    z = np.array([0.4 + 0.1j])
    assert np.allclose((a - b)(z), a(z) - b(z))
    assert np.allclose((3.0 * b)(z), 3.0 * b(z))
    assert np.allclose(b.abs()(z), np.abs(b(z)))
    assert np.allclose(b.conj()(z), np.conj(b(z)))


def test_declared_decay_order_holds_on_samples():
    g = gamma(2.0)
    z = np.array([1e3, 1e4 + 1e4j, -1e5])
    assert np.all(np.abs(g(z)) * np.abs(z) ** 3 < 10.0)


def test_simple_pole_limits():
    g = gamma(2.0)
    for p in (0.0, 1.0, 2.0):
        z = p + 1e-7 * np.exp(1j * np.array([0.1, 2.0]))
        lim = (z - p) * g(z)
        assert np.allclose(lim, g.residue_at(p), atol=1e-5)


def test_as_field_coercions():
    c = as_field(2.5)
    assert np.all(c(np.zeros(3)) == 2.5)
    assert constant(0.0).decay_order == 99
    f = as_field(lambda z: z * z)
    assert np.allclose(f(np.array([1j])), [-1.0])
    with pytest.raises(TypeError):
        as_field("nope")
