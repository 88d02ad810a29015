"""Ergodic diagnostics: traces, verdicts, sums, mixing, phases."""

import numpy as np
import pytest

from ruellelab import (CriticalOrbit, Disk, NonIntegrable, PointSet,
                       RandomStream, WholePlane, gamma, l1_norm)
from ruellelab.diagnostics import (DEGENERATING, INCONCLUSIVE,
                                   NORM_CONVERGENT, cesaro_trace,
                                   degenerating_probe,
                                   dissipative_partial_sums, ev_sequence,
                                   lattes_density_sampler,
                                   mixing_correlation, phase_sequence)
from ruellelab.fields import Field
from ruellelab.julia import postcritical_approx


def test_cesaro_trace_chebyshev_closed_form(chebyshev, rng):
    recs = cesaro_trace(chebyshev, -1.0 / 3.0, [1, 2, 4], WholePlane(),
                        300_000, rng)
    base = recs[0]
    assert base.n == 1
    for r in recs:
        expect = (2.0 / (3.0 * r.n)) * abs(1 - (-0.5) ** r.n) * abs(base.value)
        tol = 3 * (r.stderr + base.stderr) + 1e-6
        assert abs(abs(r.value) - expect) <= tol, (r.n, r.value, expect)
        assert r.tag == "asserted"


def test_cesaro_trace_contraction(chebyshev, rng):
    recs = cesaro_trace(chebyshev, -1.0 / 3.0, [1, 8], WholePlane(),
                        200_000, rng)
    base = abs(recs[0].value)
    for r in recs:
        assert abs(r.value) <= base + 3 * (r.stderr + recs[0].stderr)


def test_ev_sequence_zero_weight(chebyshev, rng):
    K = postcritical_approx(chebyshev)
    zero = Field(lambda z: np.zeros(z.shape, dtype=complex), decay_order=99)
    recs = ev_sequence(chebyshev, -1.0 / 3.0, zero, 3, K, 50_000, rng)
    assert [r.n for r in recs] == [1, 2, 3]
    assert all(r.value == 0.0 for r in recs)


def test_ev_sequence_needs_infinity(chebyshev, rng):
    K = PointSet([0.0, 1.0])
    with pytest.raises(NonIntegrable):
        ev_sequence(chebyshev, -1.0 / 3.0, 1.0, 2, K, 1000, rng)


def test_degenerating_probe_verdicts(rng):
    probe = np.linspace(-2, 2, 9) + 0.3j
    region = WholePlane()

    g = gamma(2.0 + 0.5j)
    constant_seq = [g, g, g, g]
    out = degenerating_probe(constant_seq, probe, region, 40_000, rng)
    assert out["verdict"] == NORM_CONVERGENT
    assert out["tag"] == "exploratory"

    # spreading bumps: L1 norms constant, peak values collapse
    def bump(scale, amp):
        return Field(lambda z, s=scale, a=amp:
                     (a / (1.0 + np.abs(z / s) ** 4)).astype(complex),
                     decay_order=4)

    spreading = [bump(2.0 ** k, 4.0 ** -k) for k in range(4)]
    out = degenerating_probe(spreading, probe, region, 40_000,
                             RandomStream(3), norm_bounds=(0.01, 100.0))
    assert out["verdict"] == DEGENERATING

    # alternating signs: norms constant, pointwise not collapsing
    alternating = [g * ((-1.0) ** k) for k in range(4)]
    out = degenerating_probe(alternating, probe, region, 40_000,
                             RandomStream(4))
    assert out["verdict"] == INCONCLUSIVE

    with pytest.raises(ValueError):
        degenerating_probe([g, g], probe, region, 1000, rng)


def test_dissipative_sums_basin_points(basilica):
    z = np.array([500.0, 450.0 + 300.0j, -600.0j])
    rows = dissipative_partial_sums(basilica, gamma(-1.0).abs(), z, 12)
    for row in rows:
        assert row["cauchy"] and row["tail"] <= 1e-6
        sums = row["partial_sums"]
        assert np.all(np.diff(sums) >= -1e-15)  # partial sums of moduli


def test_dissipative_sums_zero_terms(basilica):
    z = np.array([0.3 + 0.2j])
    rows = dissipative_partial_sums(basilica, gamma(-1.0).abs(), z, 0)
    expect = abs(gamma(-1.0)(z)[0])
    assert abs(rows[0]["partial_sums"][0] - expect) < 1e-12


def test_dissipative_sums_slow_near_julia(basilica):
    # near the bounded superattracting cycle the modulus series converges
    # far too slowly for the N = 12 Cauchy flag (recorded, not asserted)
    rows = dissipative_partial_sums(basilica, gamma(-1.0).abs(),
                                    np.array([0.1]), 12)
    assert not rows[0]["cauchy"]


def test_lattes_sampler_mass_and_mixing(lemniscatic):
    from ruellelab import lattes_map

    sampler, mass = lattes_density_sampler(lemniscatic)
    # frozen from the quadrature mass estimate of 1/|s| over the plane
    assert abs(mass - 3.4376) < 0.05
    a = sampler(500, RandomStream(31))
    b = sampler(500, RandomStream(31))
    assert np.array_equal(a, b)

    R = lattes_map(lemniscatic)
    A = Disk(0.9 + 0.9j, 0.5)
    B = Disk(-1.2 - 0.8j, 0.5)
    recs = mixing_correlation(R, sampler, A, A, [0], 30_000, RandomStream(32))
    assert recs[0].value.real >= -1e-12  # nu(A) - nu(A)^2 >= 0
    recs = mixing_correlation(R, sampler, A, B, [0], 30_000, RandomStream(33))
    assert recs[0].value.real <= 1e-12  # disjoint: -nu(A)nu(B)


def test_phase_sequence_real_orbit(squaring):
    phases = phase_sequence(squaring, 0.9, 5)
    assert np.allclose(phases, 1.0, atol=1e-12)


def test_phase_sequence_unimodular(basilica):
    phases = phase_sequence(basilica, 0.3 + 0.7j, 10)
    assert np.max(np.abs(np.abs(np.asarray(phases)) - 1.0)) < 1e-12


def test_phase_sequence_critical_orbit(chebyshev, squaring):
    with pytest.raises(CriticalOrbit):
        phase_sequence(chebyshev, 1.0 / 3.0, 3)  # starts on a critical point
    with pytest.raises(CriticalOrbit):
        phase_sequence(squaring, 0.0, 1)


def test_series_csv_round_trip(tmp_path):
    from ruellelab.diagnostics import SeriesRecord, _series_to_csv

    recs = [SeriesRecord(n=1, value=0.5 + 0.25j, stderr=0.01),
            SeriesRecord(n=2, value=0.25, stderr=0.02, tag="exploratory")]
    path = tmp_path / "series.csv"
    _series_to_csv(recs, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "n,value_re,value_im,stderr,tag"
    assert lines[1].split(",")[0] == "1"
    assert lines[2].endswith("exploratory")
    _series_to_csv([], tmp_path / "empty.csv")
    assert (tmp_path / "empty.csv").read_text().strip() == \
        "n,value_re,value_im,stderr,tag"
