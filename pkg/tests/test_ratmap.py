"""Rational maps: evaluation, critical data, conjugation, orbits."""

import numpy as np
import pytest

from ruellelab import (INF, DegenerateFixedPoints, MoebiusTransform,
                       Polynomial, RationalMap, is_inf)


def _has(points, target, tol=1e-8):
    if is_inf(target):
        return any(is_inf(p) for p in points)
    return any((not is_inf(p)) and abs(p - target) < tol for p in points)


def test_evaluate_with_derivative(squaring):
    v, d = squaring.evaluate(3.0, with_derivative=True)
    assert v == 9.0 and d == 6.0


def test_evaluate_at_infinity(squaring):
    v, d = squaring.evaluate(INF, with_derivative=True)
    assert is_inf(v)
    assert abs(d) < 1e-9  # chart derivative of w -> w^2 at 0


def test_evaluate_vectorized_matches_scalar(basilica):
    z = np.array([0.3 + 0.1j, -2.0, 5.0 + 5.0j])
    vals = basilica.evaluate(z)
    assert np.allclose(vals, z * z - 1.0)


def test_lattes_value_at_two():
    # (z^2+1)^2 / (4z(z^2-1)) at z=2 -> 25/24
    R = RationalMap([1.0, 0.0, 2.0, 0.0, 1.0], [0.0, -4.0, 0.0, 4.0])
    assert abs(R.evaluate(2.0) - 25.0 / 24.0) < 1e-12


def test_outer_chart_evaluation(basilica):
    z = 1e10 + 1e9j
    assert abs(basilica.evaluate(np.array([z]))[0] / (z * z) - 1) < 1e-6


def test_degree_and_validation():
    with pytest.raises(ValueError):
        RationalMap([1.0, 1.0], [1.0])  # degree 1
    with pytest.raises(ValueError):
        # num and den share the root z = 1 after reduction -> degree drops
        RationalMap([-1.0, 0.0, 1.0], [-1.0, 1.0])


def test_critical_data_squaring(squaring):
    cd = squaring.critical_data()
    assert cd.total_multiplicity == 2 * squaring.degree - 2
    assert _has([c for c, _ in cd.critical_points], 0.0)
    assert _has([c for c, _ in cd.critical_points], INF)
    assert _has(cd.critical_values, 0.0) and _has(cd.critical_values, INF)


def test_critical_data_chebyshev(chebyshev):
    cd = chebyshev.critical_data()
    assert _has([c for c, _ in cd.critical_points], 1.0 / 3.0)
    assert _has(cd.critical_values, -1.0 / 3.0)


def test_riemann_hurwitz_random_maps():
    gen = np.random.default_rng(42)
    built = 0
    while built < 15:
        deg = int(gen.integers(2, 5))
        num = gen.normal(size=deg + 1) + 1j * gen.normal(size=deg + 1)
        den = gen.normal(size=deg) + 1j * gen.normal(size=deg)
        try:
            R = RationalMap(num, den)
        except ValueError:
            continue
        cd = R.critical_data()
        assert cd.total_multiplicity == 2 * R.degree - 2
        built += 1


def test_fixed_points(squaring, chebyshev):
    fp = squaring.fixed_points()
    for t in (0.0, 1.0, INF):
        assert _has(fp, t)
    fp = chebyshev.fixed_points()
    for t in (0.0, 1.0, INF):
        assert _has(fp, t)
    R = RationalMap([-2.0, 0.0, 1.0], [1.0])  # z^2 - 2
    fp = R.fixed_points()
    for t in (2.0, -1.0, INF):
        assert _has(fp, t)


def test_moebius_normalize_identity(squaring):
    S, m = squaring.moebius_normalize(0.0, 1.0, INF)
    z = np.linspace(-1.3, 1.7, 11) + 0.2j
    assert np.allclose(S.evaluate(z), squaring.evaluate(z), atol=1e-10)


def test_moebius_normalize_z2_minus_2(chebyshev):
    R = RationalMap([-2.0, 0.0, 1.0], [1.0])
    S, m = R.moebius_normalize(-1.0, 2.0, INF)
    z = np.linspace(-0.8, 1.9, 13) + 0.11j
    assert np.allclose(S.evaluate(z), chebyshev.evaluate(z), atol=1e-9)
    # the normalizing transform is (z + 1)/3
    assert np.allclose([m(-1.0), m(2.0)], [0.0, 1.0])


def test_moebius_normalize_rejects_bad_input(squaring):
    with pytest.raises(DegenerateFixedPoints):
        squaring.moebius_normalize(0.0, 0.0, INF)
    with pytest.raises(DegenerateFixedPoints):
        squaring.moebius_normalize(0.0, 0.5, INF)  # 0.5 is not fixed


def test_moebius_from_triple_roundtrip():
    m = MoebiusTransform.from_triple(2.0 + 1j, -1.0, 0.5j)
    assert abs(m(2.0 + 1j)) < 1e-12
    assert abs(m(-1.0) - 1.0) < 1e-12
    assert abs(m.inverse()(1.0) - (-1.0)) < 1e-12
    with pytest.raises(ValueError):
        MoebiusTransform(1.0, 2.0, 2.0, 4.0)  # singular


def test_postcritical_orbits(basilica, chebyshev):
    pts, pcf = basilica.postcritical_orbit(depth=30)
    assert pcf
    for t in (-1.0, 0.0, INF):
        assert _has(pts, t)
    assert len(pts) == 3

    pts, pcf = chebyshev.postcritical_orbit(depth=30)
    assert pcf
    for t in (-1.0 / 3.0, 1.0, INF):
        assert _has(pts, t)


def test_postcritical_orbit_open(basilica):
    R = RationalMap([0.3, 0.0, 1.0], [1.0])  # z^2 + 0.3 is not PCF
    _, pcf = R.postcritical_orbit(depth=50)
    assert not pcf


def test_postcritical_monotone_in_depth(basilica):
    small, _ = basilica.postcritical_orbit(depth=2)
    large, _ = basilica.postcritical_orbit(depth=40)
    for p in small:
        assert _has(large, p)


def test_polynomial_trimming():
    p = Polynomial([1.0, 2.0, 0.0, 0.0])
    assert p.degree == 1
    assert Polynomial([0.0]).is_zero


def test_conjugate_preserves_dynamics(basilica):
    m = MoebiusTransform(2.0, 1.0, 0.0, 1.0)  # z -> 2z + 1
    S = basilica.conjugate(m)
    z = np.array([0.2 + 0.3j, -1.5, 2.0])
    assert np.allclose(S.evaluate(m(z)), m(basilica.evaluate(z)), atol=1e-10)
