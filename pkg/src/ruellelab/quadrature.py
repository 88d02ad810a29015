"""Planar-Lebesgue Monte Carlo integration with pole-aware sampling.

The sphere is covered by two charts (|z| <= 2 and w = 1/z with
|w| <= 1/2, Jacobian |w|^-4) plus polar-stratified shells around every
declared pole.  Epsilon-disks around simple poles are excluded and
accounted for by the analytic bound 2*pi*eps*|res|.  All strata draw
from split counter-based streams and reduce in fixed order, so a rerun
with the same seed and budget reproduces the estimate bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonIntegrable
from .fields import Field, as_field
from .ratmap import RationalMap
from .rng import RandomStream

EPS_DISK = 1e-4
SHELL_RADIUS = 0.4
IMPORTANCE_FRACTION = 0.3
INNER_RADIUS = 2.0
_CHUNK = 1 << 17


# -- regions --------------------------------------------------------------

class Region:
    """Measurable subsets of the plane used as integration domains."""

    kind = "abstract"

    def contains(self, z):
        raise NotImplementedError

    # radius r such that the region lies in |z| <= r, or None
    def bounding_radius(self):
        return None

    def describe(self) -> dict:
        return {"kind": self.kind}


class WholePlane(Region):
    kind = "plane"

    def contains(self, z):
        return np.ones(np.shape(z), dtype=bool)


class Disk(Region):
    kind = "disk"

    def __init__(self, center, radius):
        self.center = complex(center)
        self.radius = float(radius)

    def contains(self, z):
        return np.abs(np.asarray(z) - self.center) <= self.radius

    def bounding_radius(self):
        return abs(self.center) + self.radius

    def describe(self):
        return {"kind": "disk", "center": [self.center.real, self.center.imag],
                "radius": self.radius}


class Annulus(Region):
    kind = "annulus"

    def __init__(self, center, r_inner, r_outer):
        self.center = complex(center)
        self.r_inner = float(r_inner)
        self.r_outer = float(r_outer)

    def contains(self, z):
        r = np.abs(np.asarray(z) - self.center)
        return (r >= self.r_inner) & (r <= self.r_outer)

    def bounding_radius(self):
        return abs(self.center) + self.r_outer

    def describe(self):
        return {"kind": "annulus",
                "center": [self.center.real, self.center.imag],
                "r_inner": self.r_inner, "r_outer": self.r_outer}


class Preimage(Region):
    """R^{-1}(A), tested by membership of the image."""

    kind = "preimage"

    def __init__(self, R: RationalMap, inner: Region):
        self.map = R
        self.inner = inner

    def contains(self, z):
        return self.inner.contains(self.map.evaluate(np.asarray(z, complex)))

    def bounding_radius(self):
        # the preimage of a compact set is bounded iff it misses infinity;
        # its boundary sits inside the preimage of the boundary circle
        inner_bound = self.inner.bounding_radius()
        if inner_bound is None or not isinstance(self.inner, (Disk, Annulus)):
            return None
        from .branches import fiber_roots
        from .ratmap import INF, is_inf

        v_inf = self.map.evaluate(INF)
        if not is_inf(v_inf) and bool(np.any(
                self.inner.contains(np.asarray([v_inf])))):
            return None
        c = self.inner.center
        r_out = self.inner.radius if isinstance(self.inner, Disk) \
            else self.inner.r_outer
        theta = 2 * np.pi * np.arange(256) / 256
        w = c + r_out * np.exp(1j * theta)
        roots, _ = fiber_roots(self.map, w)
        return 1.05 * float(np.max(np.abs(roots)))

    def describe(self):
        return {"kind": "preimage", "inner": self.inner.describe()}


class Complement(Region):
    kind = "complement"

    def __init__(self, inner: Region):
        self.inner = inner

    def contains(self, z):
        return ~self.inner.contains(z)

    def describe(self):
        return {"kind": "complement", "inner": self.inner.describe()}


@dataclass
class IntegralEstimate:
    value: complex
    stderr: float
    nodes: int
    pole_correction: float

    def __add__(self, other):
        return IntegralEstimate(
            value=self.value + other.value,
            stderr=float(np.hypot(self.stderr, other.stderr)),
            nodes=self.nodes + other.nodes,
            pole_correction=self.pole_correction + other.pole_correction,
        )


# -- helpers --------------------------------------------------------------

def _dedupe_poles(poles, tol: float = 1e-9):
    out: list[complex] = []
    for p in poles:
        p = complex(p)
        if not np.isfinite(p.real) or not np.isfinite(p.imag):
            continue
        if all(abs(p - q) > tol * max(1.0, abs(p)) for q in out):
            out.append(p)
    return out


def residue_estimate(f, p, radius: float = 1e-3, n: int = 64):
    """Circular mean of (z - p) f(z): the residue for a simple pole."""
    theta = 2 * np.pi * (np.arange(n) + 0.5) / n
    z = p + radius * np.exp(1j * theta)
    vals = (z - p) * f(z)
    vals = np.where(np.isfinite(vals), vals, 0.0)
    return complex(np.mean(vals))


def _mean_and_err(weights):
    """Complex mean and scalar standard error of an estimator array."""
    n = len(weights)
    m = np.sum(weights) / n
    var = np.sum(np.abs(weights - m) ** 2) / max(n - 1, 1)
    return m, float(np.sqrt(var / n))


def _masked_eval(f, z, exclude_centers, eps):
    """f(z) with epsilon-disk exclusion and NaN scrubbing."""
    vals = f(z)
    if exclude_centers:
        c = np.asarray(exclude_centers, dtype=complex)
        near = np.min(np.abs(z[:, None] - c[None, :]), axis=1) < eps
        vals = np.where(near, 0.0, vals)
    return np.where(np.isfinite(vals), vals, 0.0)


# -- main entry points ----------------------------------------------------

def integrate(f, A: Region, budget: int, rng: RandomStream,
              eps: float = EPS_DISK,
              shell_radius: float = SHELL_RADIUS,
              importance_fraction: float = IMPORTANCE_FRACTION,
              inner_radius: float = INNER_RADIUS,
              ) -> IntegralEstimate:
    """Monte Carlo integral of f over A against planar Lebesgue measure.

    Stratification: an importance shell (area density proportional to
    1/r) around every declared pole, a uniform inner chart |z| <= 2,
    and an outer chart in w = 1/z sampled with a 1/|w| polar density so
    decay-order-3 tails have bounded weights.
    """
    f = as_field(f)
    bound = A.bounding_radius()
    unbounded = bound is None
    if unbounded and f.decay_order < 3:
        raise NonIntegrable(
            f"decay order {f.decay_order} < 3 on an unbounded region")

    poles = [p for p in _dedupe_poles(f.poles)]
    # shells must not overlap: shrink to half the minimal pairwise gap
    rho = shell_radius
    for i, p in enumerate(poles):
        for q in poles[i + 1:]:
            rho = min(rho, abs(p - q) / 2.0)
    rho = max(rho, 4 * eps)

    pole_corr = 0.0
    active_poles = []
    for p in poles:
        res = residue_estimate(f, p)
        # only poles that can meet the region contribute a correction
        if bool(np.any(A.contains(np.asarray([p])))):
            pole_corr += 2 * np.pi * eps * abs(res)
        active_poles.append(p)

    outer_needed = unbounded or bound > inner_radius
    n_shell_total = int(budget * importance_fraction) if active_poles else 0
    n_rest = budget - n_shell_total
    n_outer = int(n_rest * 0.35) if outer_needed else 0
    n_inner = n_rest - n_outer

    estimates = []
    nodes = 0

    def region_mask(z):
        return A.contains(z)

    def shell_mask(z):
        # true where z belongs to some pole shell (annulus eps..rho)
        if not active_poles:
            return np.zeros(len(z), dtype=bool)
        c = np.asarray(active_poles, dtype=complex)
        dist = np.abs(z[:, None] - c[None, :])
        return np.any((dist >= eps) & (dist <= rho), axis=1)

    # pole shells
    for k, p in enumerate(active_poles):
        n_k = n_shell_total // len(active_poles)
        if n_k == 0:
            continue
        acc = []
        stream = rng.split(100 + k)
        gen = stream.generator
        done = 0
        while done < n_k:
            m = min(_CHUNK, n_k - done)
            r = eps + (rho - eps) * gen.random(m)
            theta = 2 * np.pi * gen.random(m)
            z = p + r * np.exp(1j * theta)
            # area density of (r,theta) uniform sampling: 1/(2 pi r L)
            dens = 1.0 / (2 * np.pi * r * (rho - eps))
            vals = _masked_eval(f, z, active_poles, eps)
            w = vals * region_mask(z) / dens
            # points nearer to another pole belong to that pole's shell
            if len(active_poles) > 1:
                c = np.asarray(active_poles, dtype=complex)
                nearest = np.argmin(np.abs(z[:, None] - c[None, :]), axis=1)
                w = np.where(nearest == k, w, 0.0)
            acc.append(w)
            done += m
        m_, e_ = _mean_and_err(np.concatenate(acc))
        estimates.append((m_, e_))
        nodes += n_k

    # inner chart
    if n_inner > 0:
        stream = rng.split(1)
        gen = stream.generator
        acc = []
        done = 0
        area = np.pi * inner_radius**2
        while done < n_inner:
            m = min(_CHUNK, n_inner - done)
            r = inner_radius * np.sqrt(gen.random(m))
            theta = 2 * np.pi * gen.random(m)
            z = r * np.exp(1j * theta)
            vals = _masked_eval(f, z, active_poles, eps)
            w = vals * region_mask(z) * area
            w = np.where(shell_mask(z), 0.0, w)
            acc.append(w)
            done += m
        m_, e_ = _mean_and_err(np.concatenate(acc))
        estimates.append((m_, e_))
        nodes += n_inner

    # outer chart: w = 1/z, |w| <= 1/2, polar 1/|w| density
    if n_outer > 0:
        stream = rng.split(2)
        gen = stream.generator
        acc = []
        done = 0
        wmax = 1.0 / inner_radius
        while done < n_outer:
            m = min(_CHUNK, n_outer - done)
            r = wmax * gen.random(m)
            theta = 2 * np.pi * gen.random(m)
            w = r * np.exp(1j * theta)
            ok = r > 0
            z = np.where(ok, 1.0 / np.where(ok, w, 1.0), 0.0)
            dens_w = 1.0 / (2 * np.pi * np.where(ok, r, 1.0) * wmax)
            vals = _masked_eval(f, z, active_poles, eps)
            jac = np.where(ok, r, 1.0) ** (-4.0)
            est = vals * region_mask(z) * jac / dens_w
            est = np.where(ok & ~shell_mask(z), est, 0.0)
            acc.append(est)
            done += m
        m_, e_ = _mean_and_err(np.concatenate(acc))
        estimates.append((m_, e_))
        nodes += n_outer

    value = sum(m for m, _ in estimates)
    stderr = float(np.sqrt(sum(e * e for _, e in estimates)))
    return IntegralEstimate(value=complex(value), stderr=stderr,
                            nodes=nodes, pole_correction=float(pole_corr))


def pairing(mu, phi, A: Region, budget: int, rng: RandomStream,
            **kw) -> IntegralEstimate:
    """MC estimate of the dual pairing integral of mu * phi over A."""
    mu = as_field(mu)
    phi = as_field(phi)
    prod = Field(lambda z: mu(z) * phi(z),
                 poles=tuple(mu.poles) + tuple(phi.poles),
                 decay_order=mu.decay_order + phi.decay_order,
                 cost_hint=mu.cost_hint + phi.cost_hint)
    return integrate(prod, A, budget, rng, **kw)


def l1_norm(phi, A: Region, budget: int, rng: RandomStream,
            **kw) -> IntegralEstimate:
    """L1 norm of phi over A."""
    return integrate(as_field(phi).abs(), A, budget, rng, **kw)


def duality_residual(R: RationalMap, mu, phi, A: Region, budget: int,
                     rng: RandomStream, part: int = 1) -> dict:
    """Two-sided check of the push/pull duality over A.

    part 1 pairs mu against the push-forward of phi on A and the pulled
    mu against phi on R^{-1}(A); part 2 is the modulus variant.

    Returns a dict with both one-sided estimates, |LHS - RHS|, and the
    combined standard error.
    """
    from .operators import beltrami_apply, ruelle_apply

    modulus = part == 2
    pushed = ruelle_apply(R, phi, modulus=modulus)
    pulled = beltrami_apply(R, mu, modulus=modulus)
    lhs = pairing(mu, pushed, A, budget, rng.split(11))
    rhs = pairing(pulled, phi, Preimage(R, A), budget, rng.split(12))
    combined = float(np.hypot(lhs.stderr, rhs.stderr))
    return {
        "lhs": lhs,
        "rhs": rhs,
        "residual": abs(lhs.value - rhs.value),
        "combined_stderr": combined,
    }
