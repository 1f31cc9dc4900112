"""1D quadrature rules used to build tensor rules on charts and fibers."""

from __future__ import annotations

import numpy as np


def gauss_legendre(n, a, b):
    """Gauss-Legendre nodes/weights on (a, b). Nodes are interior."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def trapezoid_periodic(n, a, b):
    """Uniform rule on [a, b) for b-a periodic integrands.

    Spectrally accurate for smooth periodic functions.
    """
    h = (b - a) / n
    nodes = a + h * np.arange(n)
    return nodes, np.full(n, h)


def tensor_rule(rule1, rule2):
    """Tensor product of two 1D rules; returns (nodes (N,2), weights (N,))."""
    x1, w1 = rule1
    x2, w2 = rule2
    s = np.stack(np.meshgrid(x1, x2, indexing="ij"), axis=-1).reshape(-1, 2)
    w = np.outer(w1, w2).reshape(-1)
    return s, w
