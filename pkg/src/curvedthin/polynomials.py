"""Trivariate polynomials on R^3, used for profile functions and test fields.

A polynomial is stored as a map from exponent triples (i, j, k) to
coefficients; evaluation is vectorized over a leading batch axis.
"""

from __future__ import annotations

import numpy as np


class Poly3:
    """Polynomial p(x) = sum c_{ijk} x1^i x2^j x3^k."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for expo, coef in dict(terms).items():
                if coef != 0.0:
                    self.terms[tuple(int(e) for e in expo)] = float(coef)

    @staticmethod
    def constant(c):
        return Poly3({(0, 0, 0): c})

    @staticmethod
    def coordinate(i):
        expo = [0, 0, 0]
        expo[i] = 1
        return Poly3({tuple(expo): 1.0})

    def degree(self):
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for (i, j, k), c in self.terms.items():
            out = out + c * x[..., 0] ** i * x[..., 1] ** j * x[..., 2] ** k
        return out

    def partial(self, axis):
        terms = {}
        for expo, c in self.terms.items():
            e = expo[axis]
            if e == 0:
                continue
            new = list(expo)
            new[axis] = e - 1
            key = tuple(new)
            terms[key] = terms.get(key, 0.0) + c * e
        return Poly3(terms)

    def gradient(self):
        return tuple(self.partial(i) for i in range(3))

    def grad(self, x):
        """Gradient evaluated at x, shape (..., 3)."""
        gs = self.gradient()
        return np.stack([g(x) for g in gs], axis=-1)

    def hessian(self, x):
        """Hessian evaluated at x, shape (..., 3, 3)."""
        gs = self.gradient()
        rows = [np.stack([g.partial(j)(x) for j in range(3)], axis=-1) for g in gs]
        return np.stack(rows, axis=-2)

    def __add__(self, other):
        other = _as_poly(other)
        terms = dict(self.terms)
        for expo, c in other.terms.items():
            terms[expo] = terms.get(expo, 0.0) + c
        return Poly3(terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly3({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other):
        if np.isscalar(other):
            return Poly3({e: c * other for e, c in self.terms.items()})
        other = _as_poly(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                terms[key] = terms.get(key, 0.0) + c1 * c2
        return Poly3(terms)

    __rmul__ = __mul__

    def __repr__(self):
        if not self.terms:
            return "Poly3(0)"
        parts = []
        for expo in sorted(self.terms):
            c = self.terms[expo]
            mono = "".join(f"y{i + 1}^{e}" if e > 1 else f"y{i + 1}"
                           for i, e in enumerate(expo) if e > 0)
            parts.append(f"{c:g}{'*' + mono if mono else ''}")
        return "Poly3(" + " + ".join(parts) + ")"


def _as_poly(obj):
    if isinstance(obj, Poly3):
        return obj
    if np.isscalar(obj):
        return Poly3.constant(float(obj))
    raise TypeError(f"cannot coerce {obj!r} to Poly3")


X1, X2, X3 = (Poly3.coordinate(i) for i in range(3))


def cross_with_linear(a, polys):
    """Cross product a x p(x) for a constant vector a and a Poly3 triple."""
    a = np.asarray(a, dtype=float)
    p1, p2, p3 = polys
    return (a[1] * p3 - a[2] * p2, a[2] * p1 - a[0] * p3, a[0] * p2 - a[1] * p1)


def dot_polys(u, v):
    out = Poly3()
    for a, b in zip(u, v):
        out = out + a * b
    return out


def random_vector_poly(rng, degree):
    """Vector polynomial with coefficients drawn uniformly from [-1, 1]."""
    monos = [(i, j, k)
             for i in range(degree + 1)
             for j in range(degree + 1)
             for k in range(degree + 1)
             if i + j + k <= degree]
    comps = []
    for _ in range(3):
        coefs = rng.uniform(-1.0, 1.0, size=len(monos))
        comps.append(Poly3(dict(zip(monos, coefs))))
    return tuple(comps)
