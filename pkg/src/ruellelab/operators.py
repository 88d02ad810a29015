"""The transfer-operator algebra: push-forward, pull-back, moduli,
the L_p family, powers, and Cesaro averages, all as lazy fields.

Conventions (d = degree of R, branch sums over the full fiber):

    push  (quadratic differentials):  T(phi) = sum phi(zeta_i) zeta_i'^2
    modulus of push:                 |T|(phi) = sum phi(zeta_i)|zeta_i'|^2
    pull  (Beltrami forms):           B(mu)  = mu(R) conj(R')/R'
    modulus of pull:                 |B|(mu) = mu(R)
    normalized pull-back:             N(phi) = phi(R) R'^2 / d

The L_p pull is d^(-1/p) phi(R) |R'|^(2/p) conj(R')/R'; its inverse and
adjoint push carries weight |zeta'|^(2/p) and prefactor d^(-1/q) with
1/p + 1/q = 1.  This phase convention is forced by requiring that the
family interpolate the Beltrami operator at p = infinity and that
|f|^(1/p) * conj(f)/|f| be fixed whenever f is fixed by the push at
p = 1; the opposite phase (which appears in some statements of the
pull formula) breaks both properties.
"""

from __future__ import annotations

import numpy as np

from .branches import TREE_CAP, fiber_roots, sample_paths, tree_levels
from .errors import InvalidExponent, TreeTooLarge
from .fields import Field, as_field
from .ratmap import RationalMap, is_inf
from .rng import RandomStream


def _finite_images(R: RationalMap, points):
    out = []
    for p in points:
        if is_inf(p):
            continue
        v = R.evaluate(p)
        if not is_inf(v):
            out.append(complex(v))
    return out


def _critical_values_finite(R: RationalMap):
    return [complex(v) for v in R.critical_data().critical_values
            if not is_inf(v)]


def ruelle_apply(R: RationalMap, phi, modulus: bool = False) -> Field:
    """Push-forward of a quadratic-differential coefficient.

    z -> sum_i phi(zeta_i(z)) zeta_i'(z)^2, or with |zeta_i'|^2 when
    ``modulus`` is set.  Declared poles are the images of phi's poles
    together with the critical values.
    """
    phi = as_field(phi)

    def fn(z, R=R, phi=phi, modulus=modulus):
        w, dz = fiber_roots(R, z.ravel())
        vals = phi(w)
        fac = np.abs(dz) ** 2 if modulus else dz * dz
        out = np.sum(vals * fac, axis=-1)
        return out.reshape(z.shape)

    poles = _finite_images(R, phi.poles) + _critical_values_finite(R)
    return Field(fn, poles=poles, decay_order=phi.decay_order,
                 cost_hint=phi.cost_hint * R.degree + R.degree)


def beltrami_apply(R: RationalMap, mu, modulus: bool = False) -> Field:
    """Pull-back of a Beltrami coefficient: mu(R) conj(R')/R'.

    Undefined at critical points of R; evaluation returns NaN there
    (a Lebesgue-null set the quadrature layer ignores).
    """
    mu = as_field(mu)

    def fn(z, R=R, mu=mu, modulus=modulus):
        val = mu(R.evaluate(z))
        if modulus:
            return val
        der = R.derivative(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            phase = np.where(der != 0, np.conj(der) / der,
                             complex(np.nan, np.nan))
        return val * phase

    return Field(fn, poles=(), decay_order=0,
                 cost_hint=mu.cost_hint + 1)


def normalized_pullback(R: RationalMap, phi) -> Field:
    """phi(R) R'^2 / d; a right inverse of the push-forward."""
    phi = as_field(phi)

    def fn(z, R=R, phi=phi):
        der = R.derivative(z)
        return phi(R.evaluate(z)) * der * der / R.degree

    # poles pull back to the preimages of phi's poles
    pole_pre = []
    for p in phi.poles:
        coeffs = np.zeros(R.degree + 1, dtype=complex)
        coeffs[: len(R.num.coeffs)] = R.num.coeffs
        q = np.zeros(R.degree + 1, dtype=complex)
        q[: len(R.den.coeffs)] = R.den.coeffs
        from .roots import aberth

        cs = coeffs - p * q
        if abs(cs[-1]) > 1e-13 * max(1.0, float(np.max(np.abs(cs)))):
            pole_pre.extend(aberth(cs))
    return Field(fn, poles=pole_pre, decay_order=phi.decay_order,
                 cost_hint=phi.cost_hint + 1)


def lp_pull(R: RationalMap, p: float, phi) -> Field:
    """L_p pull-back d^(-1/p) phi(R) |R'|^(2/p) conj(R')/R'."""
    if p <= 1:
        raise InvalidExponent("p must exceed 1")
    phi = as_field(phi)
    d = R.degree

    def fn(z, R=R, phi=phi, p=p, d=d):
        der = R.derivative(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            phase = np.where(der != 0, np.conj(der) / der,
                             complex(np.nan, np.nan))
        return (d ** (-1.0 / p) * phi(R.evaluate(z))
                * np.abs(der) ** (2.0 / p) * phase)

    return Field(fn, poles=(), decay_order=0, cost_hint=phi.cost_hint + 1)


def lp_push(R: RationalMap, p: float, phi) -> Field:
    """L_p push-forward, the inverse and adjoint of ``lp_pull(R, p, .)``:

    d^(-1/q) sum phi(zeta_i) (conj zeta_i'/zeta_i') |zeta_i'|^(2/p).
    """
    if p <= 1:
        raise InvalidExponent("p must exceed 1")
    phi = as_field(phi)
    d = R.degree
    q = p / (p - 1.0)

    def fn(z, R=R, phi=phi, p=p, q=q, d=d):
        w, dz = fiber_roots(R, z.ravel())
        with np.errstate(divide="ignore", invalid="ignore"):
            phase = np.conj(dz) / dz
        out = d ** (-1.0 / q) * np.sum(
            phi(w) * phase * np.abs(dz) ** (2.0 / p), axis=-1)
        return out.reshape(z.shape)

    poles = _critical_values_finite(R)
    return Field(fn, poles=poles, decay_order=0,
                 cost_hint=phi.cost_hint * d + d)


def lp_operator(R: RationalMap, p: float, phi, direction: str) -> Field:
    """Spec-level entry point: direction 'pull' or 'push'."""
    if direction == "pull":
        return lp_pull(R, p, phi)
    if direction == "push":
        return lp_push(R, p, phi)
    raise ValueError(f"unknown direction {direction!r}")


def ruelle_power(R: RationalMap, n: int, phi, mode: str = "exact",
                 samples: int = 256, rng: RandomStream | None = None,
                 cap: int = TREE_CAP, modulus: bool = False) -> Field:
    """(R^*)^n phi (or |R^*|^n with ``modulus``) as a lazy field.

    'exact' expands the full backward tree (d^n <= cap); 'mc' averages
    ``samples`` modulus-importance path estimators per point and stores
    the per-point standard error on the returned field as ``stderr_fn``.
    """
    phi = as_field(phi)
    if n == 0:
        return phi
    if mode == "exact":
        if R.degree**n > cap:
            raise TreeTooLarge(
                f"d^n = {R.degree ** n} exceeds cap {cap}; use mode='mc'")

        def fn(z, R=R, phi=phi, n=n, modulus=modulus):
            flat = z.ravel()
            levels = tree_levels(R, flat, n, cap=R.degree**n * len(flat) + 1)
            pts, wts = levels[n]
            fac = np.abs(wts) ** 2 if modulus else wts * wts
            out = np.sum(phi(pts) * fac, axis=-1)
            return out.reshape(z.shape)

    elif mode == "mc":
        if rng is None:
            raise ValueError("mc mode needs an rng stream")

        def fn(z, R=R, phi=phi, n=n, samples=samples, rng=rng, modulus=modulus):
            flat = z.ravel()
            w, amp = sample_paths(R, flat, n, rng.split(n), samples,
                                  importance="modulus")
            if modulus:
                amp = np.abs(amp)
            est = phi(w) * amp
            return est.mean(axis=-1).reshape(z.shape)

    else:
        raise ValueError(f"unknown mode {mode!r}")

    poles = list(phi.poles)
    img = poles
    pole_set = list(poles)
    for _ in range(n):
        img = _finite_images(R, img)
        pole_set += img
    pole_set += _critical_values_finite(R)
    return Field(fn, poles=pole_set, decay_order=phi.decay_order,
                 cost_hint=phi.cost_hint * R.degree**min(n, 8))


def cesaro_average(R: RationalMap, n: int, phi, mode: str = "exact",
                   samples: int = 256, rng: RandomStream | None = None,
                   cap: int = TREE_CAP) -> Field:
    """(1/n) sum_{i<n} (R^*)^i phi as one lazy field.

    Exact mode reuses a single backward tree per evaluation batch, so
    the cost is that of the deepest power alone.  n = 1 returns phi.
    """
    phi = as_field(phi)
    if n < 1:
        raise ValueError("n must be >= 1 (the empty average is not defined)")
    if n == 1:
        return phi
    depth = n - 1
    if mode == "exact":
        if R.degree**depth > cap:
            raise TreeTooLarge(
                f"d^{depth} = {R.degree ** depth} exceeds cap {cap}")

        def fn(z, R=R, phi=phi, n=n, depth=depth):
            flat = z.ravel()
            acc = phi(flat).astype(complex)
            pts = flat[:, None]
            wts = np.ones_like(pts)
            for _ in range(depth):
                w, dz = fiber_roots(R, pts.ravel())
                m = pts.shape[1]
                d = R.degree
                pts = w.reshape(len(flat), m * d)
                wts = (wts[:, :, None] * dz.reshape(len(flat), m, d)
                       ).reshape(len(flat), m * d)
                acc += np.sum(phi(pts) * wts * wts, axis=-1)
            return (acc / n).reshape(z.shape)

    elif mode == "mc":
        if rng is None:
            raise ValueError("mc mode needs an rng stream")

        def fn(z, R=R, phi=phi, n=n, samples=samples, rng=rng):
            flat = z.ravel()
            acc = phi(flat).astype(complex)
            # one shared path family provides every depth
            w, amp = _cumulative_paths(R, flat, n - 1, rng.split(7), samples)
            for i in range(1, n):
                acc += (phi(w[i]) * amp[i]).mean(axis=-1)
            return (acc / n).reshape(z.shape)

    else:
        raise ValueError(f"unknown mode {mode!r}")

    poles = list(phi.poles)
    img = poles
    pole_set = list(poles)
    for _ in range(depth):
        img = _finite_images(R, img)
        pole_set += img
    pole_set += _critical_values_finite(R)
    return Field(fn, poles=pole_set, decay_order=phi.decay_order,
                 cost_hint=phi.cost_hint * R.degree**min(depth, 8))


def _cumulative_paths(R, z, n_max, rng, n_paths):
    """Modulus-importance paths with per-depth endpoints and amplitudes."""
    m = len(z)
    cur = np.repeat(np.asarray(z, complex)[:, None], n_paths, axis=1).reshape(-1)
    amp = np.ones(m * n_paths, dtype=complex)
    gen = rng.generator
    d = R.degree
    ws = {0: cur.reshape(m, n_paths).copy()}
    amps = {0: amp.reshape(m, n_paths).copy()}
    for i in range(1, n_max + 1):
        w, dz = fiber_roots(R, cur)
        dz2 = dz * dz
        prob = np.abs(dz2)
        tot = prob.sum(axis=1, keepdims=True)
        u = gen.random(len(cur))
        cdf = np.cumsum(prob / tot, axis=1)
        idx = np.sum(u[:, None] > cdf, axis=1).clip(0, d - 1)
        chosen = np.take_along_axis(dz2, idx[:, None], axis=1)[:, 0]
        cur = np.take_along_axis(w, idx[:, None], axis=1)[:, 0]
        amp = amp * (chosen / np.abs(chosen)) * tot[:, 0]
        ws[i] = cur.reshape(m, n_paths).copy()
        amps[i] = amp.reshape(m, n_paths).copy()
    return ws, amps
