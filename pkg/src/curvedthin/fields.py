"""Ambient scalar/vector fields, strain tensors, and the explicit field families.

Vector-field Jacobians follow the row convention jac[..., i, j] = d_i u_j, so
the strain tensor is the symmetric part of jac and rigid fields a x x + b have
an exactly antisymmetric, constant Jacobian.
"""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteInput, NotInKg, NotKilling, OutOfTube
from .polynomials import Poly3, X1, X2, X3, cross_with_linear, dot_polys
from .surface import dot, norm, outer, sym


def default_step(x):
    return 1e-5 * (1.0 + norm(np.asarray(x, dtype=float)))


def fd_jacobian(eval_fn, x, step=None):
    """Central-difference Jacobian, rows = coordinate partials, O(step^2)."""
    x = np.asarray(x, dtype=float)
    h = default_step(x) if step is None else np.broadcast_to(step, x.shape[:-1])
    rows = []
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        dx = h[..., None] * e
        rows.append((eval_fn(x + dx) - eval_fn(x - dx)) / (2.0 * h[..., None]))
    return np.stack(rows, axis=-2)


def fd_gradient(eval_fn, x, step=None):
    x = np.asarray(x, dtype=float)
    h = default_step(x) if step is None else np.broadcast_to(step, x.shape[:-1])
    comps = []
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        dx = h[..., None] * e
        comps.append((eval_fn(x + dx) - eval_fn(x - dx)) / (2.0 * h))
    return np.stack(comps, axis=-1)


class AmbientScalarField:
    """Scalar field on (a neighborhood of) the surface with a gradient."""

    def __init__(self, value, gradient=None, provenance="analytic"):
        self._value = value
        if gradient is None:
            gradient = lambda x: fd_gradient(value, x)
            provenance = "finite_difference"
        self._gradient = gradient
        self.provenance = provenance

    @staticmethod
    def from_poly(poly):
        field = AmbientScalarField(poly, poly.grad)
        field.poly = poly
        return field

    @staticmethod
    def constant(c):
        return AmbientScalarField.from_poly(Poly3.constant(c))

    def __call__(self, x):
        return np.asarray(self._value(np.asarray(x, dtype=float)), dtype=float)

    value = __call__

    def gradient(self, x):
        return np.asarray(self._gradient(np.asarray(x, dtype=float)), dtype=float)

    def tangential_gradient(self, frame):
        """P grad, evaluated at frame points."""
        return np.einsum("...ij,...j->...i", frame.P, self.gradient(frame.y))


class AmbientVectorField:
    """Vector field with value and spatial Jacobian (analytic or FD)."""

    def __init__(self, value, jacobian=None, provenance="analytic", name=""):
        self._value = value
        if jacobian is None:
            jacobian = lambda x: fd_jacobian(value, x)
            provenance = "finite_difference"
        self._jacobian = jacobian
        self.provenance = provenance
        self.name = name

    @staticmethod
    def from_polys(p1, p2, p3, name=""):
        polys = (p1, p2, p3)

        def value(x):
            return np.stack([p(x) for p in polys], axis=-1)

        def jacobian(x):
            # rows i = d_i, columns j = component j
            return np.stack([np.stack([p.partial(i)(x) for p in polys], axis=-1)
                             for i in range(3)], axis=-2)

        return AmbientVectorField(value, jacobian, name=name)

    @staticmethod
    def identity():
        return AmbientVectorField.from_polys(X1, X2, X3, name="x")

    def __call__(self, x):
        return np.asarray(self._value(np.asarray(x, dtype=float)), dtype=float)

    value = __call__

    def jacobian(self, x):
        return np.asarray(self._jacobian(np.asarray(x, dtype=float)), dtype=float)

    def __add__(self, other):
        prov = ("analytic" if self.provenance == other.provenance == "analytic"
                else "finite_difference")
        return AmbientVectorField(
            lambda x: self.value(x) + other.value(x),
            lambda x: self.jacobian(x) + other.jacobian(x),
            provenance=prov, name=f"{self.name}+{other.name}")

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, c):
        c = float(c)
        return AmbientVectorField(lambda x: c * self.value(x),
                                  lambda x: c * self.jacobian(x),
                                  provenance=self.provenance,
                                  name=f"{c:g}*{self.name}")

    __rmul__ = __mul__


class RigidField(AmbientVectorField):
    """Infinitesimal rigid displacement w(x) = a x x + b."""

    def __init__(self, a, b=(0.0, 0.0, 0.0), name=""):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        jac_rows = np.stack([np.cross(self.a, e) for e in np.eye(3)], axis=0)

        def value(x):
            x = np.asarray(x, dtype=float)
            return np.cross(np.broadcast_to(self.a, x.shape), x) + self.b

        def jacobian(x):
            x = np.asarray(x, dtype=float)
            return np.broadcast_to(jac_rows, x.shape[:-1] + (3, 3))

        super().__init__(value, jacobian, name=name or "rigid")


def scaled_field(scalar, vector, name=""):
    """Pointwise product p(x) * u(x) with an analytic Jacobian when available."""

    def value(x):
        return scalar.value(x)[..., None] * vector.value(x)

    def jacobian(x):
        p = scalar.value(x)
        return (outer(scalar.gradient(x), vector.value(x))
                + p[..., None, None] * vector.jacobian(x))

    prov = ("analytic" if scalar.provenance == vector.provenance == "analytic"
            else "finite_difference")
    return AmbientVectorField(value, jacobian, provenance=prov, name=name)


def strain_rate(field, x):
    """D(u) = (grad u + grad u^T) / 2."""
    jac = field.jacobian(x)
    if not np.all(np.isfinite(jac)):
        raise NonFiniteInput("field Jacobian is non-finite")
    return sym(jac)


def field_divergence(field, x):
    return np.einsum("...ii->...", field.jacobian(x))


def field_curl(field, x):
    jac = field.jacobian(x)
    return np.stack([
        jac[..., 1, 2] - jac[..., 2, 1],
        jac[..., 2, 0] - jac[..., 0, 2],
        jac[..., 0, 1] - jac[..., 1, 0],
    ], axis=-1)


def tangential_jacobian(frame, field):
    """grad_T v = P grad(vtilde) at frame points."""
    return np.einsum("...ij,...jk->...ik", frame.P, field.jacobian(frame.y))


def surface_strain(frame, field):
    """D_T(v) = P (grad_T v)_S P."""
    gt = sym(tangential_jacobian(frame, field))
    return np.einsum("...ij,...jk,...kl->...il", frame.P, gt, frame.P)


def killing_residual(surface, field, n1=None, n2=None):
    """||D_T(v)||_L2 / ||v||_L2 over the surface quadrature."""
    quad = surface.quadrature(n1, n2)
    fr = quad.frames
    d = surface_strain(fr, field)
    num = np.sum(quad.weights * np.einsum("...ij,...ij->...", d, d))
    v = field.value(fr.y)
    den = np.sum(quad.weights * dot(v, v))
    if den <= 0.0:
        return np.inf
    return float(np.sqrt(num / den))


class CounterexampleField(AmbientVectorField):
    """Impermeable near-rigid field built from a surface Killing field.

    value(x) = (I - d(x) W(pi(x))) v(pi(x))
               + eps (v(pi(x)) . grad_T g0(pi(x))) n(pi(x)).
    """

    def __init__(self, domain, cpmap, v, killing_res, kg_res):
        self.domain = domain
        self.cpmap = cpmap
        self.v = v
        self.eps = domain.eps
        self.killing_residual = killing_res
        self.kg_residual = kg_res

        def value(x):
            cp = cpmap(x)
            fr = domain.surface.frame_at(cp.s)
            vy = v.value(cp.y)
            wv = np.einsum("...ij,...j->...i", fr.weingarten, vy)
            grad0 = domain.profiles.g0.tangential_gradient(fr)
            return (vy - cp.d[..., None] * wv
                    + domain.eps * dot(vy, grad0)[..., None] * fr.n)

        super().__init__(value, jacobian=None)
        self.provenance = "finite_difference"
        self.name = "v_eps"
        sphere_jac = _sphere_counterexample(domain, v)
        if sphere_jac is not None:
            self._value, self._jacobian = sphere_jac
            self.provenance = "analytic"


def _sphere_counterexample(domain, v):
    """Closed form on the unit sphere: a x x + eps q(x/|x|) x/|x| with
    q(y) = (a x y) . grad g0(y)."""
    if domain.surface.preset != "sphere":
        return None
    if not isinstance(v, RigidField) or np.any(v.b != 0.0):
        return None
    g0 = domain.profiles.g0
    if not hasattr(g0, "poly"):
        return None
    a = v.a
    eps = domain.eps
    q = dot_polys(cross_with_linear(a, (X1, X2, X3)), g0.poly.gradient())
    jac_rigid = np.stack([np.cross(a, e) for e in np.eye(3)], axis=0)

    def value(x):
        x = np.asarray(x, dtype=float)
        r = norm(x)[..., None]
        xhat = x / r
        return np.cross(np.broadcast_to(a, x.shape), x) + eps * q(xhat)[..., None] * xhat

    def jacobian(x):
        x = np.asarray(x, dtype=float)
        r = norm(x)
        xhat = x / r[..., None]
        eye = np.broadcast_to(np.eye(3), x.shape[:-1] + (3, 3))
        phat = eye - outer(xhat, xhat)
        gq = np.einsum("...ij,...j->...i", phat, q.grad(xhat)) / r[..., None]
        corr = outer(gq, xhat) + (q(xhat) / r)[..., None, None] * phat
        return jac_rigid + eps * corr

    return value, jacobian


def counterexample_field(domain, cpmap, v, killing_tol=1e-6, kg_tol=1e-8):
    """Build the counterexample field after checking v is Killing and in K_g."""
    quad = domain.surface.quadrature()
    fr = quad.frames
    kres = killing_residual(domain.surface, v)
    if not kres < killing_tol:
        raise NotKilling(f"Killing residual {kres:.3e} >= {killing_tol:.0e}")
    vy = v.value(fr.y)
    grad_g = domain.profiles.gap_field().tangential_gradient(fr)
    scale = float(np.max(norm(vy)) * (1.0 + np.max(norm(grad_g))))
    kg = float(np.max(np.abs(dot(vy, grad_g))))
    if not kg < kg_tol * max(scale, 1e-300):
        raise NotInKg(f"max |v . grad_T g| = {kg:.3e} over nodes")
    return CounterexampleField(domain, cpmap, v, kres, kg / max(scale, 1e-300))


def g_field(domain, cpmap, u, step=None):
    """Curl-correction field G(u) = 2 n1_tilde x (W_tilde u) + n2_tilde x u.

    The tilde quantities interpolate the boundary-sheet normals and Weingarten
    maps linearly in the signed distance across the fiber.
    """
    eps = domain.eps

    def pieces(x):
        cp = cpmap(x)
        fr = domain.surface.frame_at(cp.s)
        g0 = domain.profiles.g0.value(cp.y)
        g1 = domain.profiles.g1.value(cp.y)
        gap = g1 - g0
        slack = 1e-9 * (1.0 + np.abs(cp.d))
        if np.any(cp.d < eps * g0 - slack) or np.any(cp.d > eps * g1 + slack):
            raise OutOfTube("point lies outside the closed thin domain")
        alpha1 = (cp.d - eps * g0) / (eps * gap)
        alpha0 = (eps * g1 - cp.d) / (eps * gap)
        return cp, fr, alpha0, alpha1

    def extended_normal(i):
        def nbar(z):
            cpz = cpmap(z)
            frz = domain.surface.frame_at(cpz.s)
            _, neps = domain.boundary_fields(i, frz)
            return neps
        return nbar

    def value(x):
        x = np.asarray(x, dtype=float)
        _, fr, alpha0, alpha1 = pieces(x)
        _, n0 = domain.boundary_fields(0, fr)
        _, n1 = domain.boundary_fields(1, fr)
        ntil1 = alpha1[..., None] * n1 - alpha0[..., None] * n0
        ntil2 = (alpha1[..., None] * (domain.gamma1 / domain.nu) * n1
                 + alpha0[..., None] * (domain.gamma0 / domain.nu) * n0)
        wtil = 0.0
        for i, alpha, sign in ((0, alpha0, -1.0), (1, alpha1, 1.0)):
            nbar_i = extended_normal(i)
            grad_n = fd_jacobian(nbar_i, x, step=step)
            ni = nbar_i(x)
            eye = np.broadcast_to(np.eye(3), x.shape[:-1] + (3, 3))
            w_i = -np.einsum("...ij,...jk->...ik", eye - outer(ni, ni), grad_n)
            wtil = wtil + sign * alpha[..., None, None] * w_i
        uval = u.value(x)
        wu = np.einsum("...ij,...j->...i", wtil, uval)
        return 2.0 * np.cross(ntil1, wu) + np.cross(ntil2, uval)

    return AmbientVectorField(value, jacobian=None, name=f"G({u.name})")
