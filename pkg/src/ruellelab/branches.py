"""Inverse branches: fibers, backward trees, and backward sampling.

The d preimages of z are the roots of P(w) - z Q(w); branch derivatives
are dzeta = 1/R'(w).  Everything is batched over arrays of base points,
which is what the operator and quadrature layers consume.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CriticalFiberWarning, TreeTooLarge
from .ratmap import RationalMap, is_inf
from .rng import RandomStream
from .roots import aberth, polish

TREE_CAP = 4**8


@dataclass
class PreimageFan:
    """All d preimages of one base point with branch derivatives."""

    base: complex
    branches: list  # (w_i, dzeta_i) pairs; dzeta_i = 1/R'(w_i), inf at critical w


@dataclass
class BackwardOrbit:
    """One backward orbit z = w_0 <- w_1 <- ... <- w_n."""

    points: list
    weight: complex  # product of branch derivatives, = 1/(R^n)'(w_n)
    sampling_prob: float


def _fiber_coeffs(R: RationalMap, z):
    """Ascending coefficients of P(w) - z Q(w), batched over z."""
    z = np.asarray(z, dtype=complex)
    d = R.degree
    p = np.zeros(d + 1, dtype=complex)
    q = np.zeros(d + 1, dtype=complex)
    p[: len(R.num.coeffs)] = R.num.coeffs
    q[: len(R.den.coeffs)] = R.den.coeffs
    return p[None, :] - z.ravel()[:, None] * q[None, :]


def fiber_roots(R: RationalMap, z, polish_steps: int = 2):
    """Preimage arrays for a batch of base points.

    Parameters
    ----------
    R : RationalMap
    z : array_like of finite complex base points, shape (n,)

    Returns
    -------
    w : ndarray (n, d) of preimages
    dzeta : ndarray (n, d) of branch derivatives 1/R'(w) (inf at
        critical preimages)

    Requires a nonvanishing leading coefficient of P - zQ, i.e. either
    deg P > deg Q, or z away from the ratio of leading coefficients.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    coeffs = _fiber_coeffs(R, z)
    w = aberth(coeffs)
    if polish_steps:
        w = polish(coeffs, w, steps=polish_steps)
    der = R.derivative(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        dz = np.where(der != 0, 1.0 / der, complex(np.inf, 0))
    return w.reshape(*shape, R.degree), dz.reshape(*shape, R.degree)


def preimages(R: RationalMap, z, warn_tol: float = 1e-8) -> PreimageFan:
    """The full fiber over one point, as a PreimageFan."""
    if is_inf(z):
        # preimages of infinity: roots of Q, plus infinity if deg P > deg Q
        ws = list(R.den.roots())
        ws += [complex(np.inf, 0)] * (R.degree - len(ws))
        branches = []
        for w in ws:
            if is_inf(w):
                branches.append((w, complex(np.nan, np.nan)))
            else:
                der = complex(R.derivative(np.asarray(w))[()])
                branches.append((w, 1.0 / der if der != 0 else complex(np.inf, 0)))
        return PreimageFan(base=z, branches=branches)
    cv = [v for v in R.critical_data().critical_values if not is_inf(v)]
    if any(abs(z - v) < warn_tol for v in cv):
        warnings.warn(
            f"base point {z} is within {warn_tol} of a critical value",
            CriticalFiberWarning,
            stacklevel=2,
        )
    w, dz = fiber_roots(R, np.asarray([z]))
    return PreimageFan(base=complex(z), branches=list(zip(w[0], dz[0])))


def tree_levels(R: RationalMap, z, n: int, cap: int = TREE_CAP):
    """Breadth-first backward tree over a batch of base points.

    Returns a list of (points, weights) per level k = 0..n where points
    has shape (len(z), d**k) and weights accumulate branch derivatives.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    d = R.degree
    if d**n > cap:
        raise TreeTooLarge(f"d^n = {d**n} exceeds cap {cap}")
    pts = z[:, None]
    wts = np.ones_like(pts)
    levels = [(pts, wts)]
    for _ in range(n):
        w, dz = fiber_roots(R, pts.ravel())
        m = pts.shape[1]
        pts = w.reshape(len(z), m * d)
        wts = (wts[:, :, None] * dz.reshape(len(z), m, d)).reshape(len(z), m * d)
        levels.append((pts, wts))
    return levels


def backward_tree(R: RationalMap, z, n: int, cap: int = TREE_CAP):
    """All d^n backward orbits of depth n from a single point."""
    levels = tree_levels(R, np.asarray([z]), n, cap=cap)
    d = R.degree
    orbits = []
    total = d**n
    for leaf in range(total):
        points = []
        for k in range(n, -1, -1):
            pos = leaf // (d ** (n - k))
            points.append(complex(levels[k][0][0, pos]))
        points = points[::-1]
        orbits.append(
            BackwardOrbit(
                points=points,
                weight=complex(levels[n][1][0, leaf]),
                sampling_prob=1.0 / total,
            )
        )
    return orbits


def backward_sample(
    R: RationalMap,
    z,
    n: int,
    rng: RandomStream,
    max_retries: int = 8,
    critical_tol: float = 1e-12,
) -> BackwardOrbit:
    """One uniformly random backward orbit of depth n.

    The estimator d^n * f(w_n) * weight^2 is unbiased for ((R^*)^n f)(z).
    """
    gen = rng.generator
    for _ in range(max_retries + 1):
        pts = [complex(z)]
        weight = 1.0 + 0.0j
        ok = True
        for _ in range(n):
            w, dz = fiber_roots(R, np.asarray([pts[-1]]))
            i = int(gen.integers(R.degree))
            if not np.isfinite(dz[0, i]):
                ok = False
                break
            pts.append(complex(w[0, i]))
            weight *= complex(dz[0, i])
        if ok:
            return BackwardOrbit(points=pts, weight=weight,
                                 sampling_prob=R.degree ** (-n))
    raise TreeTooLarge("backward sampling kept hitting critical fibers")


def sample_paths(R: RationalMap, z, n: int, rng: RandomStream, n_paths: int,
                 importance: str = "uniform"):
    """Batched backward paths for Monte Carlo operator estimates.

    Parameters
    ----------
    z : array (m,) of base points; each gets ``n_paths`` paths.
    importance : 'uniform' draws branches uniformly (weight correction
        d^n); 'modulus' draws proportionally to |dzeta|^2, which removes
        the critical-fiber variance blowup.

    Returns
    -------
    w : (m, n_paths) endpoints after n steps
    amp : (m, n_paths) complex amplitudes such that
        mean over paths of f(w) * amp estimates ((R^*)^n f)(z).
    """
    z = np.asarray(z, dtype=complex)
    m = len(z)
    cur = np.repeat(z[:, None], n_paths, axis=1).reshape(-1)
    amp = np.ones(m * n_paths, dtype=complex)
    d = R.degree
    gen = rng.generator
    for _ in range(n):
        w, dz = fiber_roots(R, cur)
        dz2 = dz * dz
        if importance == "uniform":
            idx = gen.integers(d, size=len(cur))
            pick = np.take_along_axis(w, idx[:, None], axis=1)[:, 0]
            amp *= d * np.take_along_axis(dz2, idx[:, None], axis=1)[:, 0]
        else:
            prob = np.abs(dz2)
            tot = prob.sum(axis=1, keepdims=True)
            prob = prob / tot
            u = gen.random(len(cur))
            cdf = np.cumsum(prob, axis=1)
            idx = np.sum(u[:, None] > cdf, axis=1).clip(0, d - 1)
            chosen_dz2 = np.take_along_axis(dz2, idx[:, None], axis=1)[:, 0]
            pick = np.take_along_axis(w, idx[:, None], axis=1)[:, 0]
            phase = chosen_dz2 / np.abs(chosen_dz2)
            amp *= phase * tot[:, 0]
        cur = pick
    return cur.reshape(m, n_paths), amp.reshape(m, n_paths)
