"""Simultaneous polynomial root finding (Aberth-Ehrlich iteration).

The solver operates on batches: an array of shape (..., deg+1) of
ascending coefficients is solved fiber-by-fiber in lockstep, which is
the access pattern of inverse-branch computations where thousands of
polynomials differing only in the constant part must be solved at once.
"""

from __future__ import annotations

import numpy as np

from .errors import RootSolveFailure

_MAX_ITER = 200
_TOL = 1e-13


def _horner_val_der(coeffs, w):
    """Evaluate p(w) and p'(w) for stacked coefficients.

    coeffs: (..., n+1) ascending, w: (..., k) roots per fiber.
    Returns arrays of shape (..., k).
    """
    n = coeffs.shape[-1] - 1
    p = np.broadcast_to(coeffs[..., n, None], w.shape).astype(complex)
    dp = np.zeros_like(w)
    for j in range(n - 1, -1, -1):
        dp = dp * w + p
        p = p * w + coeffs[..., j, None]
    return p, dp


def aberth(coeffs, max_iter: int = _MAX_ITER, tol: float = _TOL):
    """All roots of each polynomial in the batch.

    Parameters
    ----------
    coeffs : array_like, shape (..., deg+1)
        Ascending coefficients; the leading coefficient must be nonzero
        in every fiber (degree drops are the caller's concern).

    Returns
    -------
    roots : ndarray, shape (..., deg)
        Unordered roots per fiber.
    """
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    squeeze = np.asarray(coeffs).ndim == 1
    n = c.shape[-1] - 1
    if n < 1:
        raise ValueError("degree must be at least 1")
    lead = c[..., -1]
    if np.any(np.abs(lead) == 0):
        raise RootSolveFailure("vanishing leading coefficient in batch")

    if n == 1:
        roots = (-c[..., 0] / c[..., 1])[..., None]
        return roots[0] if squeeze else roots
    if n == 2:
        roots = _quadratic(c)
        return roots[0] if squeeze else roots

    # Initial guesses: perturbed circle scaled by the Cauchy-style bound.
    with np.errstate(divide="ignore", invalid="ignore"):
        mags = np.abs(c[..., :-1] / lead[..., None])
    r = 1.0 + np.max(mags, axis=-1)
    k = np.arange(n)
    angles = 2 * np.pi * (k + 0.35) / n + 0.31
    w = r[..., None] * np.exp(1j * angles)

    scale = np.max(np.abs(c), axis=-1)[..., None]
    for _ in range(max_iter):
        p, dp = _horner_val_der(c, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(dp != 0, p / dp, 0.0)
            diff = w[..., :, None] - w[..., None, :]
            np.einsum("...ii->...i", diff)[...] = np.inf
            s = np.sum(1.0 / diff, axis=-1)
            denom = 1.0 - newton * s
            step = np.where(denom != 0, newton / denom, newton)
        w = w - step
        # Convergence on backward-stable residuals.
        res = np.abs(p) / (scale * np.maximum(1.0, np.abs(w)) ** n)
        if np.all(res < tol):
            break
    else:
        p, _ = _horner_val_der(c, w)
        res = np.abs(p) / (scale * np.maximum(1.0, np.abs(w)) ** n)
        if np.any(res > 1e-6):
            raise RootSolveFailure(
                f"Aberth iteration stalled, worst residual {res.max():.3e}")

    w = polish(c, w)
    return w[0] if squeeze else w


def _quadratic(c):
    """Stable quadratic formula for batches, ascending coeffs (c0,c1,c2)."""
    a = c[..., 2]
    b = c[..., 1]
    c0 = c[..., 0]
    disc = np.sqrt(b * b - 4 * a * c0 + 0j)
    # Avoid cancellation: pick the sign that enlarges |b + s*disc|.
    s = np.where(np.abs(b + disc) >= np.abs(b - disc), 1.0, -1.0)
    q = -0.5 * (b + s * disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = q / a
        r2 = np.where(q != 0, c0 / q, -b / a - r1)
    return np.stack([r1, r2], axis=-1)


def polish(coeffs, w, steps: int = 2):
    """A few Newton steps on already separated roots."""
    c = np.asarray(coeffs, dtype=complex)
    for _ in range(steps):
        p, dp = _horner_val_der(c, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(dp != 0, p / dp, 0.0)
        w = w - step
    return w


def cluster_roots(roots, tol: float):
    """Group a 1-D root array into (representative, multiplicity) pairs."""
    roots = np.asarray(roots, dtype=complex).ravel()
    used = np.zeros(len(roots), dtype=bool)
    out = []
    for i in range(len(roots)):
        if used[i]:
            continue
        close = np.abs(roots - roots[i]) <= tol
        close &= ~used
        members = roots[close]
        used |= close
        out.append((members.mean(), len(members)))
    return out
