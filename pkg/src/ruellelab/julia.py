"""Julia and postcritical point sets, distance weights, and the
Boettcher-coordinate Beltrami differential on superattracting basins.

The quasihyperbolic density 1/dist(z, K) stands in for the hyperbolic
metric of the complement of K.  The true metric of a multiply connected
domain has no closed form; by the Koebe distortion theorem the two are
comparable within a factor of 4, so every diagnostic built on this
weight is meaningful up to bounded distortion and is asserted only
qualitatively (positivity, monotonicity, boundedness), never by value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoRepellingFixedPoint, NotEscaped, OnBoundary
from .fields import Field
from .ratmap import INF, RationalMap, is_inf
from .rng import RandomStream

DEDUP_TOL = 1e-9
BOUNDARY_TOL = 1e-12
MAX_ESCAPE_ITER = 200


@dataclass
class PointSet:
    """Finite deduplicated point collection with a provenance tag."""

    points: list
    generator: str = "forward-orbit"
    finite: np.ndarray = field(init=False, repr=False)
    has_inf: bool = field(init=False)

    def __post_init__(self):
        fin, has_inf = [], False
        arr = np.empty(len(self.points), dtype=complex)
        n = 0
        for p in self.points:
            p = complex(p)
            if is_inf(p):
                has_inf = True
                continue
            if n == 0 or np.min(np.abs(arr[:n] - p)) > DEDUP_TOL:
                arr[n] = p
                n += 1
        fin = list(arr[:n])
        self.finite = np.asarray(fin, dtype=complex)
        self.has_inf = has_inf
        pts = [complex(p) for p in fin]
        if has_inf:
            pts.append(INF)
        self.points = pts

    def __len__(self):
        return len(self.finite) + (1 if self.has_inf else 0)

    def distance(self, z):
        """Distance from z to the set; the point at infinity is
        measured in the 1/z chart, so dist(z, inf) = 1/|z|."""
        z = np.asarray(z, dtype=complex)
        d = np.full(z.shape, np.inf)
        if len(self.finite):
            d = np.min(np.abs(z[..., None] - self.finite), axis=-1)
        if self.has_inf:
            with np.errstate(divide="ignore"):
                d = np.minimum(d, 1.0 / np.abs(z))
        return d

    def to_csv(self, path):
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im"])
            for p in self.finite:
                w.writerow([repr(p.real), repr(p.imag)])
            if self.has_inf:
                w.writerow(["inf", "0.0"])


def repelling_fixed_point(R: RationalMap):
    """A fixed point with |multiplier| > 1, preferring the largest."""
    best, best_mult = None, 1.0
    saw_inf = False
    for p in R.fixed_points():
        if is_inf(p):
            saw_inf = True
            continue
        mult = abs(R.derivative(np.asarray([p]))[0])
        if mult > best_mult:
            best, best_mult = complex(p), mult
    if best is not None:
        return best
    if saw_inf:
        # multiplier at infinity in the w = 1/z chart: g(w) = 1/R(1/w)
        h = 1e-7
        w = R.evaluate(1.0 / h)
        if not is_inf(w) and w != 0 and abs((1.0 / w) / h) > 1.0:
            return INF
    raise NoRepellingFixedPoint(
        "no fixed point with |multiplier| > 1 found")


def julia_sample(R: RationalMap, count: int, burn: int,
                 rng: RandomStream) -> PointSet:
    """Random inverse-iteration samples accumulating on the Julia set.

    Starts at a repelling fixed point (or a generic point when none is
    repelling) and walks one uniformly random preimage per step; the
    first ``burn`` steps are discarded.  count=1, burn=0 returns the
    starting point itself.
    """
    from .branches import backward_sample

    try:
        z0 = repelling_fixed_point(R)
    except NoRepellingFixedPoint:
        z0 = complex(0.4437, 0.2951)
    if is_inf(z0):
        z0 = complex(1e6, 0.0)

    gen = rng.split(0)
    pts = [z0]
    z = z0
    total = burn + count - 1
    for _ in range(total):
        z = backward_sample(R, z, 1, gen).points[-1]
        pts.append(complex(z))
    return PointSet(pts[burn:], generator="inverse-iteration")


def postcritical_approx(R: RationalMap, depth: int = 64) -> PointSet:
    """Forward orbit of the critical values as a PointSet."""
    pts, _ = R.postcritical_orbit(depth=depth)
    return PointSet(pts, generator="forward-orbit")


def quasihyperbolic_weight(z, K: PointSet):
    """dist(z, K)^(-2), the quasihyperbolic stand-in for the squared
    hyperbolic density of the complement of K."""
    d = K.distance(z)
    if np.any(d <= BOUNDARY_TOL):
        raise OnBoundary(f"point within {BOUNDARY_TOL} of the set")
    return d ** (-2.0)


# -- Boettcher coordinate -------------------------------------------------

def escape_radius(poly: RationalMap) -> float:
    return 2.0 * max(1.0, float(np.sum(np.abs(poly.num.coeffs))))


def _log_bottcher(poly: RationalMap, z, r_esc: float):
    """log Phi by telescoping log(z_{k+1} / (a z_k^d)) for escaped z."""
    d = poly.degree
    a = complex(poly.num.coeffs[-1])
    z = np.asarray(z, dtype=complex)
    out = np.log(z) + np.log(a) / (d - 1)
    cur = z
    scale = 1.0
    for _ in range(64):
        nxt = poly.evaluate(cur)
        ratio = nxt / (a * cur**d)
        term = np.log(ratio) * (scale / d)
        out = out + term
        if np.all(np.abs(term) < 1e-16):
            break
        cur = nxt
        scale /= d
    return out


def bottcher_field(poly: RationalMap, kind: str = "coordinate") -> Field:
    """Boettcher coordinate Phi near infinity, or the invariant
    Beltrami differential nu = Phi conj(Phi') / (conj(Phi) Phi').

    Phi conjugates the polynomial to w -> w^d on the superattracting
    basin of infinity and is tangent to the identity there (after the
    leading-coefficient normalization).  Points inside the escape
    radius are iterated forward first (at most 200 steps) and the
    d^n-th root taken; the root ambiguity is a unimodular factor that
    cancels in nu.  Raises NotEscaped for points that never escape.
    """
    if poly.den.degree != 0:
        raise ValueError("Boettcher coordinate needs a polynomial map")
    if kind not in ("coordinate", "beltrami"):
        raise ValueError(f"unknown kind {kind!r}")
    d = poly.degree
    r_esc = escape_radius(poly)

    def phi(z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        n_steps = np.zeros(flat.shape, dtype=int)
        cur = flat.copy()
        for _ in range(MAX_ESCAPE_ITER):
            low = np.abs(cur) <= r_esc
            if not np.any(low):
                break
            cur = np.where(low, poly.evaluate(cur), cur)
            n_steps = n_steps + low
        if np.any(np.abs(cur) <= r_esc):
            raise NotEscaped(
                f"points failed to leave radius {r_esc} "
                f"within {MAX_ESCAPE_ITER} iterations")
        logs = _log_bottcher(poly, cur, r_esc)
        logs = logs * (1.0 / d**n_steps.astype(float))
        return np.exp(logs).reshape(z.shape)

    if kind == "coordinate":
        return Field(phi, poles=(), decay_order=-1, cost_hint=8)

    def nu_far(w):
        # direct stencil; valid where no forward iteration is needed,
        # so Phi is analytic across the whole stencil
        # step balances Richardson truncation (h^4) against the
        # cancellation roundoff (eps/h) near the identity map
        h = 1e-3 * np.maximum(1.0, np.abs(w))

        def diff(step):
            return (phi(w + step) - phi(w - step)) / (2 * step)

        dphi = (4.0 * diff(h / 2) - diff(h)) / 3.0
        val = phi(w)
        return val * np.conj(dphi) / (np.conj(val) * dphi)

    def nu(z):
        # nu is invariant under the Beltrami pull-back, so push the
        # point far into the basin and pull the phase back exactly
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        cur = flat.copy()
        dprod = np.ones(flat.shape, dtype=complex)
        for _ in range(MAX_ESCAPE_ITER):
            low = np.abs(cur) <= 4.0 * r_esc
            if not np.any(low):
                break
            dprod = np.where(low, dprod * poly.derivative(cur), dprod)
            cur = np.where(low, poly.evaluate(cur), cur)
        if np.any(np.abs(cur) <= 4.0 * r_esc):
            raise NotEscaped(
                f"points failed to leave radius {4.0 * r_esc} "
                f"within {MAX_ESCAPE_ITER} iterations")
        out = nu_far(cur) * np.conj(dprod) / dprod
        return out.reshape(z.shape)

    return Field(nu, poles=(), decay_order=0, cost_hint=40)
