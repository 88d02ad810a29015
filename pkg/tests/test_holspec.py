"""Transfer matrices on gamma bases via dual residue extraction."""

import numpy as np
import pytest

from ruellelab import (EmptyBasis, NotPCF, RationalMap, gamma,
                       normalized_lattes)
from ruellelab.holspec import (HolBasis, eigen_spectrum, hol_basis,
                               pushforward_residues, spectrum_to_json,
                               transfer_matrix)


def test_chebyshev_residue_table(chebyshev):
    g = gamma(-1.0 / 3.0)
    table = pushforward_residues(chebyshev, g)
    got = {round(p.real, 6): r for p, r in table}
    assert abs(got[0.0] - 2.0 / 3.0) < 1e-9
    assert abs(got[1.0] - (-1.0 / 6.0)) < 1e-9
    assert abs(got[round(-1.0 / 3.0, 6)] - (-0.5)) < 1e-9
    # decay certificate: residues of a cubic-decay field sum to zero
    assert abs(sum(r for _, r in table)) < 1e-8


def test_residue_formula_instance(squaring):
    # pole at p = 1 with residue 1 and R'(1) = 2 contributes 1/2 at R(1)
    from ruellelab import gamma_field

    phi = gamma_field(3.0, 5.0, 1.0)  # unit residue at a = 1
    table = pushforward_residues(squaring, phi)
    at_one = [r for p, r in table if abs(p - 1.0) < 1e-9]
    assert len(at_one) == 1 and abs(at_one[0] - 0.5) < 1e-9
    assert abs(sum(r for _, r in table)) < 1e-8


def test_pushforward_residues_requires_rational(squaring):
    from ruellelab.fields import Field

    with pytest.raises(TypeError):
        pushforward_residues(squaring, Field(lambda z: z))


def test_hol_basis_chebyshev(chebyshev):
    basis = hol_basis(chebyshev)
    assert len(basis) == 1
    assert abs(basis.poles[0] - (-1.0 / 3.0)) < 1e-9
    assert basis.index_of(-1.0 / 3.0) == 0
    assert basis.index_of(0.7) is None


def test_hol_basis_error_cases(squaring):
    with pytest.raises(EmptyBasis):
        hol_basis(squaring)  # every candidate gamma degenerates
    R = RationalMap([0.3, 0.0, 1.0], [1.0])  # z^2 + 0.3, not PCF
    with pytest.raises(NotPCF):
        hol_basis(R, depth=40)


def test_transfer_matrix_chebyshev(chebyshev):
    M = transfer_matrix(chebyshev)
    assert M.entries.shape == (1, 1)
    assert abs(M.entries[0, 0] - (-0.5)) < 1e-8
    blob = M.to_json()
    assert blob["entries"] == [[[M.entries[0, 0].real,
                                 M.entries[0, 0].imag]]]


def test_transfer_matrix_normalized_lattes(lemniscatic):
    S, _ = normalized_lattes(lemniscatic)
    M = transfer_matrix(S)
    vals, vecs = eigen_spectrum(M)
    assert abs(vals[0] - 1.0) < 1e-6
    assert float(np.max(np.abs(vals))) <= 1.0 + 1e-6


def test_eigen_spectrum_basics():
    vals, _ = eigen_spectrum(np.array([[-0.5]], dtype=complex))
    assert np.allclose(vals, [-0.5])
    vals, _ = eigen_spectrum(np.eye(3, dtype=complex))
    assert np.allclose(vals, [1.0, 1.0, 1.0])
    vals, _ = eigen_spectrum(np.diag([0.1, 2.0, -1.0]).astype(complex))
    assert np.allclose(vals, [2.0, -1.0, 0.1])  # sorted by modulus
    with pytest.raises(ValueError):
        eigen_spectrum(np.zeros((2, 3), dtype=complex))
    with pytest.raises(ValueError):
        eigen_spectrum(np.eye(65, dtype=complex))


def test_spectrum_json_shape():
    vals, vecs = eigen_spectrum(np.eye(2, dtype=complex))
    blob = spectrum_to_json(vals, vecs)
    assert len(blob["eigenvalues"]) == 2
    assert len(blob["eigenvectors"]) == 2
    assert blob["eigenvalues"][0] == [1.0, 0.0]


def test_hol_basis_container():
    b = HolBasis(poles=[0.5 + 0.0j, 2.0 + 1.0j])
    assert len(b) == 2
    assert b.index_of(2.0 + 1.0j) == 1
