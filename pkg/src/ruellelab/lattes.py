"""The flexible degree-4 family from the Weierstrass duplication formula.

These maps are the positive controls of the whole laboratory: the
push-forward fixes f = 1/s with s(z) = 4z^3 - g2 z - g3, the pull-back
fixes nu = s/|s|, and |f|^(1/p) mu is fixed by the L_p pull for every p.
All three closed forms derive from pulling the flat torus differential
through the degree-two cover and are validated against an independent
Weierstrass-series oracle in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLattice
from .fields import Field, RationalField
from .ratmap import RationalMap
from .rng import RandomStream
from .roots import aberth


@dataclass
class LattesParams:
    g2: complex
    g3: complex

    def __post_init__(self):
        self.g2 = complex(self.g2)
        self.g3 = complex(self.g3)
        disc = self.g2**3 - 27 * self.g3**2
        scale = max(abs(self.g2) ** 3, abs(self.g3) ** 2, 1.0)
        if abs(disc) < 1e-10 * scale:
            raise DegenerateLattice(f"discriminant {disc} vanishes")


def lattes_map(params: LattesParams) -> RationalMap:
    """The duplication map of the curve with invariants (g2, g3):

    R(z) = (z^4 + (g2/2) z^2 + 2 g3 z + g2^2/16) / (4z^3 - g2 z - g3).
    """
    g2, g3 = params.g2, params.g3
    num = [g2**2 / 16, 2 * g3, g2 / 2, 0.0, 1.0]
    den = [-g3, -g2, 0.0, 4.0]
    return RationalMap(num, den)


def cubic_roots(params: LattesParams):
    """Roots of s(z) = 4z^3 - g2 z - g3 (the finite branch points)."""
    return aberth(np.array([-params.g3, -params.g2, 0.0, 4.0], dtype=complex))


def lattes_invariants(params: LattesParams):
    """(f, nu, psi) for the duplication map.

    f = 1/s is the push-forward fixed density; nu = s/|s| is the
    invariant Beltrami differential; psi(p) = |f|^(1/p) * mu with
    mu = conj(f)/|f| (phase convention chosen so that the pairing
    of f with mu integrates |f| > 0) is fixed by the L_p pull.
    """
    g2, g3 = params.g2, params.g3
    roots = cubic_roots(params)

    def s(z):
        return 4 * z**3 - g2 * z - g3

    def ds(z):
        return 12 * z**2 - g2

    f = RationalField(roots, 1.0 / ds(roots))

    def nu_fn(z):
        v = s(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return v / np.abs(v)

    nu = Field(nu_fn, poles=(), decay_order=0)

    def psi(p: float) -> Field:
        def fn(z, p=p):
            v = s(z)
            with np.errstate(divide="ignore", invalid="ignore"):
                # |f|^(1/p) * conj(f)/|f| with f = 1/s
                return np.abs(v) ** (-1.0 / p) * (np.abs(v) / np.conj(v))
        return Field(fn, poles=tuple(roots), decay_order=0)

    return f, nu, psi


def admissible_points(params: LattesParams, count: int, rng: RandomStream,
                      min_dist: float = 0.1, radius: float = 3.0):
    """Random points at safe distance from poles and critical values."""
    R = lattes_map(params)
    bad = list(cubic_roots(params))
    bad += [v for v in R.critical_data().critical_values
            if np.isfinite(v.real) and np.isfinite(v.imag)]
    bad = np.asarray(bad, dtype=complex)
    gen = rng.generator
    out = []
    while len(out) < count:
        z = (gen.random(4 * count) * 2 - 1) * radius \
            + 1j * (gen.random(4 * count) * 2 - 1) * radius
        ok = np.min(np.abs(z[:, None] - bad[None, :]), axis=1) > min_dist
        out.extend(z[ok][: count - len(out)])
    return np.asarray(out[:count], dtype=complex)


def lattes_residuals(params: LattesParams, n_points: int,
                     rng: RandomStream) -> dict:
    """Sup-norm residuals of the three fixed-point identities.

    Returns {'ruelle': ., 'ruelle_modulus': ., 'beltrami': .,
    'lp': {2: ., 3: .}} measured at admissible random points.
    """
    from .operators import beltrami_apply, lp_pull, ruelle_apply

    R = lattes_map(params)
    f, nu, psi = lattes_invariants(params)
    z = admissible_points(params, n_points, rng)

    fz = f(z)
    r_ruelle = np.max(np.abs(ruelle_apply(R, f)(z) - fz) / np.abs(fz))
    r_mod = np.max(
        np.abs(ruelle_apply(R, f.abs(), modulus=True)(z) - np.abs(fz))
        / np.abs(fz))
    r_belt = np.max(np.abs(beltrami_apply(R, nu)(z) - nu(z)))
    r_lp = {}
    for p in (2, 3):
        pp = psi(p)
        r_lp[p] = float(np.max(np.abs(lp_pull(R, p, pp)(z) - pp(z))))
    return {
        "ruelle": float(r_ruelle),
        "ruelle_modulus": float(r_mod),
        "beltrami": float(r_belt),
        "lp": r_lp,
    }


def normalized_lattes(params: LattesParams):
    """(S, m): the duplication map conjugated to fix {0, 1, infinity}.

    m sends two finite fixed points to 0 and 1 and keeps infinity, so
    the transfer-matrix machinery (which works on the gamma basis
    attached to {0, 1}) applies to S.  Returns the conjugated map and
    the Moebius transform.
    """
    from .ratmap import INF, is_inf

    R = lattes_map(params)
    fps = sorted((complex(p) for p in R.fixed_points() if not is_inf(p)),
                 key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    if len(fps) < 2:
        raise DegenerateLattice("fewer than two finite fixed points")
    S, m = R.moebius_normalize(fps[0], fps[1], INF)
    return S, m


# -- independent Weierstrass oracle --------------------------------------

def weierstrass_p(u, g2, g3, terms: int = 40):
    """The Weierstrass elliptic function by its Laurent series at 0.

    Valid for |u| inside the lattice injectivity radius; used only as
    an independent check of the duplication construction, at small |u|.
    """
    c = np.zeros(terms + 1, dtype=complex)
    c[2] = g2 / 20.0
    c[3] = g3 / 28.0
    for k in range(4, terms + 1):
        acc = sum(c[m] * c[k - m] for m in range(2, k - 1))
        c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3))
    u = np.asarray(u, dtype=complex)
    out = 1.0 / (u * u)
    for k in range(2, terms + 1):
        out = out + c[k] * u ** (2 * k - 2)
    return out
