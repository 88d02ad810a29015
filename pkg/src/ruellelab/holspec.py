"""Finite transfer matrices on the gamma basis via residue calculus.

For a postcritically finite map fixing {0, 1, infinity}, the span of
the test functions gamma_a over the forward orbit of the critical
values (plus the orbits of 0 and 1) is invariant under the
push-forward.  Each pushed basis element is again rational with decay
order three and simple poles inside the basis and {0, 1}, so its
residues at the basis points are exactly its expansion coefficients.

Residues are extracted twice: from the analytic contribution formulas
(res/R' at regular preimage poles, phi(c)/R'' over simple critical
points) and from circular contour means of the pushed field; any
disagreement beyond tolerance aborts, since critical-value residues
are the easiest place for silent sign errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (EmptyBasis, ExpansionResidual, HigherOrderCritical,
                     NoConvergence, NotPCF, ResidueMismatch)
from .fields import RationalField, gamma
from .operators import ruelle_apply
from .quadrature import residue_estimate
from .ratmap import CHART_RADIUS, INF, RationalMap, is_inf
from .rng import RandomStream

CONTOUR_RADIUS = 1e-3
CROSS_TOL = 1e-6
MERGE_TOL = 1e-6
MAX_DIM = 64


@dataclass
class HolBasis:
    """Ordered finite basis points a with gamma_a nondegenerate."""

    poles: list

    def __len__(self):
        return len(self.poles)

    def index_of(self, p, tol: float = MERGE_TOL):
        for i, a in enumerate(self.poles):
            if abs(a - p) <= tol * max(1.0, abs(a)):
                return i
        return None


@dataclass
class TransferMatrix:
    """entries[b, a] = coefficient of gamma_b in the push of gamma_a."""

    entries: np.ndarray
    basis: HolBasis

    def to_json(self) -> dict:
        return {
            "basis": [[p.real, p.imag] for p in self.basis.poles],
            "entries": [[[v.real, v.imag] for v in row]
                        for row in self.entries],
        }


def _merge_add(table: list, pole, value, tol: float = 1e-8):
    for i, (p, v) in enumerate(table):
        if abs(p - pole) <= tol * max(1.0, abs(p)):
            table[i] = (p, v + value)
            return
    table.append((complex(pole), complex(value)))


def pushforward_residues(R: RationalMap, phi: RationalField,
                         cross_tol: float = CROSS_TOL):
    """Residue table of the pushed-forward rational field.

    Returns a list of (pole, residue) pairs for the push of phi, one
    entry per distinct finite pole, assembled from the analytic
    contribution formulas and cross-checked against contour means of
    the pushed field.  Critical points of local degree above two fall
    back to pure contour extraction for their critical value.
    """
    if not isinstance(phi, RationalField):
        raise TypeError("pushforward residue calculus needs a RationalField")

    table: list = []
    contour_only: list = []

    # regular preimage poles: res/R' lands at R(p)
    for p, r in zip(phi.poles, phi.residues):
        v = R.evaluate(p)
        if is_inf(v) or abs(v) > CHART_RADIUS:
            continue
        dR = complex(R.derivative(np.asarray([p]))[0])
        if abs(dR) < 1e-8:
            # pole sits on a critical point; the formula degenerates
            _merge_add(table, v, 0.0)
            contour_only.append(complex(v))
            continue
        _merge_add(table, v, r / dR)

    # critical contributions: phi(c)/R''(c) lands at the critical value
    cd = R.critical_data()
    for (c, mult), v in zip(cd.critical_points, cd.critical_values):
        if is_inf(c) or is_inf(v) or abs(v) > CHART_RADIUS:
            continue
        if mult > 1:
            _merge_add(table, v, 0.0)
            contour_only.append(complex(v))
            continue
        d2 = complex(R.second_derivative(np.asarray([c]))[0])
        _merge_add(table, v, complex(phi(np.asarray([c]))[0]) / d2)

    pushed = ruelle_apply(R, phi)
    out = []
    for p, analytic in table:
        contour = residue_estimate(pushed, p, radius=CONTOUR_RADIUS)
        if any(abs(p - q) <= 1e-8 * max(1.0, abs(p)) for q in contour_only):
            out.append((p, contour))
            continue
        if abs(analytic - contour) > cross_tol * max(1.0, abs(analytic)):
            raise ResidueMismatch(
                f"pole {p}: analytic {analytic} vs contour {contour}")
        out.append((p, analytic))
    out.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return out


def _forward_orbit(R: RationalMap, z0, depth: int, merge_tol: float = 1e-9):
    """Finite forward orbit of z0, or None if no cycle is reached."""
    orbit = []
    z = z0
    for _ in range(depth + 1):
        if is_inf(z) or abs(z) > CHART_RADIUS:
            return orbit
        if any(abs(z - w) <= merge_tol * max(1.0, abs(w)) for w in orbit):
            return orbit
        orbit.append(complex(z))
        z = R.evaluate(z)
    return None


def hol_basis(R: RationalMap, depth: int = 64) -> HolBasis:
    """Basis points: finite forward orbit of the critical values and of
    {0, 1}, with 0 and 1 themselves (degenerate gammas) excluded."""
    _, pcf = R.postcritical_orbit(depth)
    if not pcf:
        raise NotPCF(f"critical orbits did not close within depth {depth}")

    seeds = [complex(v) for v in R.critical_data().critical_values
             if not is_inf(v) and abs(v) <= CHART_RADIUS]
    seeds += [0.0 + 0.0j, 1.0 + 0.0j]
    pts: list = []
    for s in seeds:
        orbit = _forward_orbit(R, s, depth)
        if orbit is None:
            raise NotPCF(f"orbit of {s} did not close within depth {depth}")
        for z in orbit:
            if abs(z) <= 1e-9 or abs(z - 1.0) <= 1e-9:
                continue
            if all(abs(z - w) > 1e-9 * max(1.0, abs(w)) for w in pts):
                pts.append(z)
    if not pts:
        raise EmptyBasis("every candidate basis element degenerates")
    pts.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    return HolBasis(poles=pts)


def transfer_matrix(R: RationalMap, depth: int = 64,
                    recon_tol: float = 1e-6) -> TransferMatrix:
    """Matrix of the push-forward on the gamma basis of a PCF map.

    The map must fix {0, 1, infinity} (conjugate with
    ``moebius_normalize`` first).  Every column is verified pointwise:
    expanding it against the basis must reproduce the pushed field at
    random off-pole points within ``recon_tol``.
    """
    basis = hol_basis(R, depth)
    n = len(basis)
    if n > MAX_DIM:
        raise NotPCF(f"basis dimension {n} exceeds {MAX_DIM}")
    M = np.zeros((n, n), dtype=complex)

    # fixed off-pole probe points for the reconstruction check
    gen = RandomStream(314159, (0,)).generator
    probes = (gen.random(200) * 4 - 2) + 1j * (gen.random(200) * 4 - 2)
    special = np.asarray(basis.poles + [0.0, 1.0], dtype=complex)
    far = np.min(np.abs(probes[:, None] - special[None, :]), axis=1) > 0.05
    probes = probes[far][:50]

    for j, a in enumerate(basis.poles):
        g_a = gamma(a)
        residues = pushforward_residues(R, g_a)
        for p, r in residues:
            if abs(p) <= MERGE_TOL or abs(p - 1.0) <= MERGE_TOL:
                continue  # absorbed by the two decay certificates
            i = basis.index_of(p)
            if i is None:
                raise ExpansionResidual(
                    f"push of gamma_{a} has a pole {p} outside the basis")
            M[i, j] += r
        pushed = ruelle_apply(R, g_a)(probes)
        recon = np.zeros(len(probes), dtype=complex)
        for i, b in enumerate(basis.poles):
            if M[i, j] != 0:
                recon += M[i, j] * gamma(b)(probes)
        err = float(np.max(np.abs(pushed - recon)))
        if err > recon_tol:
            raise ExpansionResidual(
                f"column {a}: reconstruction error {err:.3e}")
    return TransferMatrix(entries=M, basis=basis)


def eigen_spectrum(M: TransferMatrix):
    """Eigenvalues (sorted by decreasing modulus) and eigenvectors.

    Returns (values, vectors) with vectors[:, k] the unit eigenvector
    of values[k].
    """
    A = np.asarray(M.entries if isinstance(M, TransferMatrix) else M,
                   dtype=complex)
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if A.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {A.shape[0]} exceeds {MAX_DIM}")
    try:
        vals, vecs = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.argsort(-np.abs(vals), kind="stable")
    return vals[order], vecs[:, order]


def spectrum_to_json(vals, vecs) -> dict:
    return {
        "eigenvalues": [[v.real, v.imag] for v in vals],
        "eigenvectors": [[[x.real, x.imag] for x in vecs[:, k]]
                         for k in range(vecs.shape[1])],
    }
