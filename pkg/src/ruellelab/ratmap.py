"""Rational maps of the Riemann sphere with exact coefficient arithmetic.

Points are plain complex numbers; the point at infinity is the value
``INF`` (complex infinity).  All evaluation routines accept numpy
arrays and switch to the 1/z chart beyond ``CHART_RADIUS``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegenerateFixedPoints, RootSolveFailure
from .roots import aberth, cluster_roots

INF = complex(np.inf, 0.0)
CHART_RADIUS = 1e8


def is_inf(z):
    z = np.asarray(z)
    return np.isinf(z.real) | np.isinf(z.imag)


class Polynomial:
    """Complex polynomial, ascending coefficients, trimmed leading zeros."""

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        scale = np.max(np.abs(c)) if c.size else 0.0
        if scale > 0:
            nz = np.nonzero(np.abs(c) > 1e-14 * scale)[0]
            c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        else:
            c = np.zeros(1, dtype=complex)
        self.coeffs = c

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if not self.is_zero else -1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, z):
        return npoly.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def deriv(self) -> "Polynomial":
        if self.degree <= 0:
            return Polynomial([0.0])
        return Polynomial(npoly.polyder(self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial(npoly.polymul(self.coeffs, other.coeffs))
        return Polynomial(self.coeffs * other)

    __rmul__ = __mul__

    def __add__(self, other):
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return Polynomial(npoly.polysub(self.coeffs, other.coeffs))

    def roots(self):
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return aberth(self.coeffs)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)})"


def _resultant_magnitude(p: Polynomial, q: Polynomial) -> float:
    """|det Sylvester(p, q)| as a coprimality witness."""
    m, n = p.degree, q.degree
    if m < 0 or n < 0:
        return 0.0
    if m == 0 or n == 0:
        return 1.0
    s = np.zeros((m + n, m + n), dtype=complex)
    pc = p.coeffs[::-1]
    qc = q.coeffs[::-1]
    for i in range(n):
        s[i, i : i + m + 1] = pc
    for i in range(m):
        s[n + i, i : i + n + 1] = qc
    return float(abs(np.linalg.det(s)))


@dataclass
class MoebiusTransform:
    """z -> (a z + b) / (c z + d), with ad - bc != 0."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("singular Moebius transform")

    def __call__(self, z):
        if np.isscalar(z) or np.asarray(z).ndim == 0:
            if is_inf(z):
                return self.a / self.c if self.c != 0 else INF
            den = self.c * z + self.d
            if den == 0:
                return INF
            return (self.a * z + self.b) / den
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.a * z + self.b) / (self.c * z + self.d)
        inf_in = is_inf(z)
        if np.any(inf_in):
            out = np.where(inf_in, self.a / self.c if self.c != 0 else INF, out)
        return out

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.d, -self.b, -self.c, self.a)

    @staticmethod
    def from_triple(p, q, r) -> "MoebiusTransform":
        """The unique transform with p -> 0, q -> 1, r -> infinity."""
        pts = [p, q, r]
        if sum(bool(is_inf(x)) for x in pts) > 1:
            raise ValueError("points must be distinct")
        if is_inf(r):
            # affine: (z - p) / (q - p)
            return MoebiusTransform(1.0, -p, 0.0, q - p)
        if is_inf(p):
            return MoebiusTransform(q - r, 0.0 * 1j, 1.0, -r)
        if is_inf(q):
            return MoebiusTransform(1.0, -p, 1.0, -r)
        return MoebiusTransform(q - r, -p * (q - r), q - p, -r * (q - p))


@dataclass
class CriticalData:
    critical_points: list  # (point, multiplicity) pairs
    critical_values: list  # image of each critical point

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.critical_points)


class RationalMap:
    """Reduced ratio P/Q of complex polynomials, degree >= 2."""

    def __init__(self, num, den, *, reduce: bool = True):
        p = num if isinstance(num, Polynomial) else Polynomial(num)
        q = den if isinstance(den, Polynomial) else Polynomial(den)
        if q.is_zero:
            raise ValueError("zero denominator")
        if reduce:
            p, q = _reduce_pair(p, q)
        self.num = p
        self.den = q
        self.degree = max(p.degree, q.degree)
        if self.degree < 2:
            raise ValueError("degree must be at least 2")
        norm = float(np.max(np.abs(np.concatenate([p.coeffs, q.coeffs]))))
        if _resultant_magnitude(p, q) < 1e-10 * norm:
            raise ValueError("numerator and denominator share a root")
        self._dnum = p.deriv()
        self._dden = q.deriv()

    # -- evaluation -------------------------------------------------------

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z, with_derivative: bool = False):
        """R(z), optionally with R'(z).

        Vectorized over arrays of finite points; scalar input may be INF,
        in which case the derivative returned is the chart derivative of
        w -> 1/R(1/w) at w = 0.
        """
        scalar = np.isscalar(z) or np.asarray(z).ndim == 0
        if scalar and is_inf(z):
            return self._eval_at_inf(with_derivative)
        z = np.asarray(z, dtype=complex)
        big = np.abs(z) > CHART_RADIUS
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            pv = self.num(z)
            qv = self.den(z)
            val = np.where(qv != 0, pv / qv, INF)
            if np.any(big):
                val = np.where(big, self._eval_outer(z), val)
        if not with_derivative:
            return complex(val[()]) if scalar else val
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            der = self.derivative(z)
        if scalar:
            return complex(val[()]), complex(der[()])
        return val, der

    def _eval_outer(self, z):
        # R(z) for huge |z| via the reversed-coefficient form in w = 1/z.
        with np.errstate(divide="ignore", invalid="ignore"):
            w = 1.0 / z
        np_, nq = self.num.degree, self.den.degree
        ph = npoly.polyval(w, self.num.coeffs[::-1])
        qh = npoly.polyval(w, self.den.coeffs[::-1])
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.where(qh != 0, w ** (nq - np_) * ph / qh, INF)

    def _eval_at_inf(self, with_derivative):
        np_, nq = self.num.degree, self.den.degree
        pl = self.num.coeffs[-1]
        ql = self.den.coeffs[-1]
        if np_ > nq:
            val = INF
        elif np_ < nq:
            val = 0.0 + 0.0j
        else:
            val = pl / ql
        if not with_derivative:
            return val
        # chart derivative of the appropriate local representative at w=0
        h = 1e-6
        if is_inf(val):
            g = lambda w: 1.0 / self.evaluate(1.0 / w)  # noqa: E731
        else:
            g = lambda w: self.evaluate(1.0 / w)  # noqa: E731
        der = (g(h) - g(-h)) / (2 * h)
        return val, complex(der)

    def derivative(self, z):
        """R'(z) = (P'Q - PQ')/Q^2 at finite points."""
        z = np.asarray(z, dtype=complex)
        qv = self.den(z)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return (self._dnum(z) * qv - self.num(z) * self._dden(z)) / (qv * qv)

    def second_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        p, q = self.num, self.den
        dp, dq = self._dnum, self._dden
        d2p = dp.deriv()
        d2q = dq.deriv()
        pv, qv = p(z), q(z)
        dpv, dqv = dp(z), dq(z)
        num = (d2p(z) * qv - pv * d2q(z)) * qv - 2 * dqv * (dpv * qv - pv * dqv)
        return num / qv**3

    def iterate(self, z, n: int):
        for _ in range(n):
            z = self.evaluate(z)
        return z

    # -- structure --------------------------------------------------------

    def wronskian(self) -> Polynomial:
        return self._dnum * self.den - self.num * self._dden

    def critical_data(self, tol: float = 1e-7) -> CriticalData:
        """Critical points with multiplicities (sum = 2d-2) and values."""
        w = self.wronskian()
        pts = []
        if w.degree >= 1:
            try:
                finite = w.roots()
            except RootSolveFailure:
                raise
            pts = cluster_roots(finite, tol * max(1.0, float(np.max(np.abs(finite)))))
        missing = 2 * self.degree - 2 - sum(m for _, m in pts)
        if missing > 0:
            pts.append((INF, missing))
        values = [self.evaluate(c) if not is_inf(c) else self._eval_at_inf(False)
                  for c, _ in pts]
        return CriticalData(critical_points=pts, critical_values=values)

    def fixed_points(self, tol: float = 1e-9):
        """Roots of P(z) - z Q(z), plus infinity when the degree drops."""
        g = self.num - Polynomial(np.concatenate([[0], self.den.coeffs]))
        pts = list(g.roots()) if g.degree >= 1 else []
        if len(pts) < self.degree + 1:
            pts += [INF] * (self.degree + 1 - len(pts))
        return pts

    def conjugate(self, m: MoebiusTransform) -> "RationalMap":
        """m o R o m^{-1} as an exact rational map."""
        mi = m.inverse()
        # substitute z = mi(w) into P and Q homogeneously
        p_h, q_h = _compose_with_moebius(self.num, self.den, mi)
        # then apply m to the value: (a P + b Q) / (c P + d Q)
        num = m.a * p_h + m.b * q_h
        den = m.c * p_h + m.d * q_h
        return RationalMap(num, den)

    def moebius_normalize(self, p, q, r, tol: float = 1e-8):
        """Conjugate so the fixed points p, q, r go to 0, 1, infinity."""
        pts = [p, q, r]
        for i in range(3):
            for j in range(i + 1, 3):
                a, b = pts[i], pts[j]
                if is_inf(a) and is_inf(b):
                    raise DegenerateFixedPoints("repeated point at infinity")
                if not is_inf(a) and not is_inf(b) and abs(a - b) < tol:
                    raise DegenerateFixedPoints(f"points {a} and {b} coincide")
        for x in pts:
            y = self.evaluate(x) if not is_inf(x) else self._eval_at_inf(False)
            if is_inf(x) != bool(is_inf(y)) or (
                not is_inf(x) and abs(y - x) > tol * max(1.0, abs(x))
            ):
                raise DegenerateFixedPoints(f"{x} is not a fixed point")
        m = MoebiusTransform.from_triple(p, q, r)
        return self.conjugate(m), m

    def postcritical_orbit(self, depth: int, merge_tol: float = 1e-9):
        """Forward orbits of the critical values up to ``depth``.

        Returns (points, pcf) where ``points`` is the merged orbit set and
        ``pcf`` is True when every orbit enters a cycle before ``depth``.
        """
        if depth < 1:
            raise ValueError("depth must be >= 1")
        cd = self.critical_data()
        merged: list[complex] = []

        def _add(z):
            for w in merged:
                if _close(z, w, merge_tol):
                    return
            merged.append(z)

        den_roots = (aberth(self.den.coeffs)
                     if self.den.degree >= 1 else np.zeros(0, dtype=complex))

        def _step(z):
            if is_inf(z):
                return self._eval_at_inf(False)
            # roundoff can leave an orbit point a hair off a pole;
            # points within the merge tolerance of a pole go to infinity
            if den_roots.size and np.min(np.abs(den_roots - z)) < merge_tol:
                return INF
            return self.evaluate(z)

        pcf = True
        for v in cd.critical_values:
            orbit = [v]
            z = v
            cycled = False
            for _ in range(depth):
                z = _step(z)
                if not is_inf(z) and abs(z) > CHART_RADIUS:
                    # huge but not exactly infinity: the orbit escapes,
                    # so it never lands in a cycle
                    break
                if any(_close(z, w, merge_tol) for w in orbit):
                    cycled = True
                    break
                orbit.append(z)
            if not cycled:
                pcf = False
            for w in orbit:
                _add(w)
        return merged, pcf

    def __repr__(self):
        return f"RationalMap({list(self.num.coeffs)}, {list(self.den.coeffs)})"


def _close(a, b, tol):
    ia, ib = bool(is_inf(a)), bool(is_inf(b))
    if ia or ib:
        return ia and ib
    if abs(a - b) <= tol * max(1.0, abs(a)):
        return True
    # agree in the 1/z chart for huge values
    return abs(a) > CHART_RADIUS and abs(b) > CHART_RADIUS and abs(1 / a - 1 / b) <= tol


def _reduce_pair(p: Polynomial, q: Polynomial):
    """Numerical gcd reduction: drop root pairs shared within tolerance."""
    if p.is_zero or p.degree < 1 or q.degree < 1:
        return p, q
    rp = list(p.roots())
    rq = list(q.roots())
    scale = max(1.0, *(abs(r) for r in rp + rq))
    tol = 1e-10 * scale
    keep_q = rq[:]
    kept_p = []
    for r in rp:
        hit = None
        for i, s in enumerate(keep_q):
            if abs(r - s) < tol:
                hit = i
                break
        if hit is None:
            kept_p.append(r)
        else:
            keep_q.pop(hit)
    if len(kept_p) == len(rp):
        return p, q
    pl = p.coeffs[-1]
    ql = q.coeffs[-1]
    return (
        Polynomial(pl * npoly.polyfromroots(kept_p)),
        Polynomial(ql * npoly.polyfromroots(keep_q)),
    )


def _compose_with_moebius(p: Polynomial, q: Polynomial, m: MoebiusTransform):
    """Homogenized substitution z -> m(w) into the pair (P, Q).

    Returns polynomials (P~, Q~) with P(m(w))/Q(m(w)) = P~(w)/Q~(w).
    """
    n = max(p.degree, q.degree)
    a = Polynomial([m.b, m.a])  # a w + b, numerator of m
    c = Polynomial([m.d, m.c])
    # powers of (aw+b) and (cw+d)
    apows = [Polynomial([1.0])]
    cpows = [Polynomial([1.0])]
    for _ in range(n):
        apows.append(apows[-1] * a)
        cpows.append(cpows[-1] * c)

    def hom(u: Polynomial) -> Polynomial:
        out = Polynomial([0.0])
        for k, ck in enumerate(u.coeffs):
            out = out + ck * (apows[k] * cpows[n - k])
        return out

    return hom(p), hom(q)


def from_coeff_lists(num_pairs, den_pairs) -> RationalMap:
    """Build a map from [re, im] coefficient pairs, ascending degree."""
    num = [complex(re, im) for re, im in num_pairs]
    den = [complex(re, im) for re, im in den_pairs]
    return RationalMap(num, den)
