"""Lazily composable pointwise-evaluable fields on the sphere.

A ``Field`` wraps a vectorized complex function together with the
bookkeeping the quadrature layer needs: declared (simple) poles, decay
order at infinity, and a rough evaluation cost.  Fields are immutable
and freely shareable; combining them never builds grids.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import ZeroFieldWarning


class Field:
    """Pointwise-evaluable complex function with quadrature metadata.

    Parameters
    ----------
    fn : callable
        Maps a complex ndarray to a complex ndarray of the same shape.
    poles : sequence of complex
        Declared simple poles (finite points).  Spurious entries are
        harmless; missing ones degrade quadrature accuracy.
    decay_order : int
        k such that |f(z)| |z|^k stays bounded as z -> infinity;
        k >= 3 is required for integration over unbounded regions.
    cost_hint : int
        Relative cost of one evaluation (1 = closed form).
    """

    def __init__(self, fn, poles=(), decay_order=0, cost_hint=1):
        self._fn = fn
        self.poles = tuple(complex(p) for p in poles)
        self.decay_order = int(decay_order)
        self.cost_hint = int(cost_hint)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self._fn(z)
        return np.asarray(out, dtype=complex)

    # -- algebra ----------------------------------------------------------

    def __add__(self, other):
        other = as_field(other)
        return Field(
            lambda z, a=self, b=other: a(z) + b(z),
            poles=self.poles + other.poles,
            decay_order=min(self.decay_order, other.decay_order),
            cost_hint=self.cost_hint + other.cost_hint,
        )

    def __sub__(self, other):
        return self + (as_field(other) * (-1.0))

    def __mul__(self, other):
        if np.isscalar(other):
            return Field(
                lambda z, a=self, c=other: c * a(z),
                poles=self.poles,
                decay_order=self.decay_order,
                cost_hint=self.cost_hint,
            )
        other = as_field(other)
        return Field(
            lambda z, a=self, b=other: a(z) * b(z),
            poles=self.poles + other.poles,
            decay_order=self.decay_order + other.decay_order,
            cost_hint=self.cost_hint + other.cost_hint,
        )

    __rmul__ = __mul__

    def abs(self) -> "Field":
        """|f| as a field (decay and poles carried over)."""
        return Field(
            lambda z, a=self: np.abs(a(z)).astype(complex),
            poles=self.poles,
            decay_order=self.decay_order,
            cost_hint=self.cost_hint,
        )

    def conj(self) -> "Field":
        return Field(
            lambda z, a=self: np.conj(a(z)),
            poles=self.poles,
            decay_order=self.decay_order,
            cost_hint=self.cost_hint,
        )


def as_field(x) -> Field:
    if isinstance(x, Field):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return constant(x)
    if callable(x):
        return Field(x)
    raise TypeError(f"cannot interpret {x!r} as a field")


def constant(c) -> Field:
    c = complex(c)
    return Field(lambda z: np.full(np.shape(z), c, dtype=complex),
                 decay_order=0 if c != 0 else 99)


ZERO = constant(0.0)


class RationalField(Field):
    """Pure partial fraction sum r_i/(z - p_i) with decay order >= 3.

    Carries its poles *and residues* exactly, which is what the residue
    calculus of the spectrum module consumes.
    """

    def __init__(self, poles, residues):
        poles = np.asarray(poles, dtype=complex)
        residues = np.asarray(residues, dtype=complex)
        if poles.shape != residues.shape:
            raise ValueError("poles and residues must align")
        self.residues = residues

        def fn(z, p=poles, r=residues):
            zz = z[..., None]
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.sum(r / (zz - p), axis=-1)

        decay = 3 if len(poles) else 99
        super().__init__(fn, poles=poles, decay_order=decay,
                         cost_hint=max(1, len(poles)))

    def residue_at(self, p, tol=1e-9):
        for q, r in zip(self.poles, self.residues):
            if abs(q - p) <= tol * max(1.0, abs(p)):
                return complex(r)
        return 0.0 + 0.0j


def gamma_field(x1, x2, a) -> Field:
    """Cubic-decay test function with unit residue at ``a``.

    (x1-a)(x2-a) / ((z-x1)(z-x2)(z-a)); with (x1, x2) = (0, 1) this is
    the standard gamma test function of the pole parameter ``a``.
    Degenerate choices a in {x1, x2} give the zero field (with a
    warning), mirroring the vanishing numerator.
    """
    x1, x2, a = complex(x1), complex(x2), complex(a)
    if x1 == x2:
        raise ValueError("x1 and x2 must be distinct")
    if a == x1 or a == x2:
        warnings.warn("degenerate pole parameter: field is identically zero",
                      ZeroFieldWarning, stacklevel=2)
        return ZERO
    # partial fractions of the triple pole product
    r1 = (x2 - a) / (x1 - x2)
    r2 = (x1 - a) / (x2 - x1)
    return RationalField([x1, x2, a], [r1, r2, 1.0])


def gamma(v) -> Field:
    """gamma_v = v(v-1)/(z(z-1)(z-v)), the standard normalization."""
    return gamma_field(0.0, 1.0, v)
