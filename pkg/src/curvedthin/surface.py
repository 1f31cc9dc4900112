"""Closed parametrized surfaces.

Provides analytic single-chart presets (sphere, torus of revolution, surface
of revolution from a profile curve, triaxial ellipsoid), pointwise frames with
first/second fundamental forms and the ambient Weingarten matrix, tangential
calculus, and tensor quadrature over the chart.

Conventions
-----------
The unit normal n points outward.  The Weingarten matrix is the 3x3 ambient
map W = -grad_T n with W n = 0; its tangent-plane eigenvalues are the
principal curvatures, so the unit sphere has kappa1 = kappa2 = -1 and
H = tr W = -2.  For a matrix field such as the gradient of a vector field,
entry (i, j) holds the i-th coordinate derivative of the j-th component.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import quadrature as quadrules
from .errors import DegenerateChart, NonFiniteInput, NotTangential

DEFAULT_N1 = 64
DEFAULT_N2 = 128

_DET_FLOOR = 1e-12


def dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def norm(a):
    return np.sqrt(dot(a, a))


def outer(a, b):
    return a[..., :, None] * b[..., None, :]


def sym(m):
    return 0.5 * (m + np.swapaxes(m, -1, -2))


class Chart:
    """Analytic parametrization mu of a coordinate patch.

    All evaluators map parameter arrays of shape (..., 2) to point or vector
    arrays of shape (..., 3).  ``normal_sign`` orients
    n = normal_sign * (d1 x d2) / |d1 x d2| outward.
    """

    def __init__(self, pos, d1, d2, d11, d12, d22, bounds, periodic,
                 normal_sign=1.0):
        self.pos = pos
        self.d1 = d1
        self.d2 = d2
        self.d11 = d11
        self.d12 = d12
        self.d22 = d22
        self.bounds = tuple((float(a), float(b)) for a, b in bounds)
        self.periodic = tuple(bool(p) for p in periodic)
        self.normal_sign = float(normal_sign)

    def wrap(self, s):
        """Wrap periodic parameters into their fundamental interval."""
        s = np.array(s, dtype=float, copy=True)
        for k in range(2):
            if self.periodic[k]:
                a, b = self.bounds[k]
                s[..., k] = a + np.mod(s[..., k] - a, b - a)
        return s

    def contains(self, s):
        s = np.asarray(s, dtype=float)
        ok = np.ones(s.shape[:-1], dtype=bool)
        for k in range(2):
            if not self.periodic[k]:
                a, b = self.bounds[k]
                ok &= (s[..., k] >= a) & (s[..., k] <= b)
        return ok


@dataclasses.dataclass(frozen=True)
class SurfaceFrame:
    """Pointwise geometric state; every field supports a batch leading shape."""

    s: np.ndarray
    y: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    n: np.ndarray
    theta: np.ndarray
    theta_inv: np.ndarray
    det_theta: np.ndarray
    second_form: np.ndarray
    weingarten: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    mean_curvature: np.ndarray
    sym_defect: np.ndarray

    @property
    def P(self):
        eye = np.broadcast_to(np.eye(3), self.n.shape + (3,))
        return eye - outer(self.n, self.n)

    @property
    def Q(self):
        return outer(self.n, self.n)

    def __len__(self):
        return self.y.shape[0]

    def item(self, idx):
        """Single-point view of a batched frame."""
        return SurfaceFrame(**{
            f.name: getattr(self, f.name)[idx]
            for f in dataclasses.fields(SurfaceFrame)
        })


def frames_from_chart(chart, s):
    """Assemble SurfaceFrame data at parameter values s of shape (..., 2)."""
    s = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(s)):
        raise NonFiniteInput("chart parameters contain non-finite values")
    y = chart.pos(s)
    t1 = chart.d1(s)
    t2 = chart.d2(s)
    th11 = dot(t1, t1)
    th12 = dot(t1, t2)
    th22 = dot(t2, t2)
    det = th11 * th22 - th12 ** 2
    if np.any(det <= _DET_FLOOR):
        raise DegenerateChart(f"det(theta) <= {_DET_FLOOR} at some point")
    theta = np.stack([
        np.stack([th11, th12], axis=-1),
        np.stack([th12, th22], axis=-1),
    ], axis=-2)
    inv_det = 1.0 / det
    theta_inv = np.stack([
        np.stack([th22 * inv_det, -th12 * inv_det], axis=-1),
        np.stack([-th12 * inv_det, th11 * inv_det], axis=-1),
    ], axis=-2)

    cross = np.cross(t1, t2)
    cn = norm(cross)
    n = chart.normal_sign * cross / cn[..., None]

    m11 = chart.d11(s)
    m12 = chart.d12(s)
    m22 = chart.d22(s)
    ii = np.stack([
        np.stack([dot(m11, n), dot(m12, n)], axis=-1),
        np.stack([dot(m12, n), dot(m22, n)], axis=-1),
    ], axis=-2)

    # dn/ds_k from the unnormalized cross product c = t1 x t2
    dc1 = np.cross(m11, t2) + np.cross(t1, m12)
    dc2 = np.cross(m12, t2) + np.cross(t1, m22)
    def _dnormal(dc):
        return chart.normal_sign * (dc / cn[..., None]
                                    - cross * dot(cross, dc)[..., None] / cn[..., None] ** 3)
    dn1 = _dnormal(dc1)
    dn2 = _dnormal(dc2)

    # Solve W [t1 t2 n] = [-dn1 -dn2 0] in the moving frame, then symmetrize.
    a_cols = np.stack([t1, t2, n], axis=-1)
    b_cols = np.stack([-dn1, -dn2, np.zeros_like(n)], axis=-1)
    # W A = B  =>  A^T W^T = B^T
    w_t = np.linalg.solve(np.swapaxes(a_cols, -1, -2), np.swapaxes(b_cols, -1, -2))
    w_raw = np.swapaxes(w_t, -1, -2)
    defect = norm((w_raw - np.swapaxes(w_raw, -1, -2)).reshape(w_raw.shape[:-2] + (9,)))
    w = sym(w_raw)

    # Principal curvatures from the symmetric 2x2 restriction to the tangent plane.
    e1 = t1 / norm(t1)[..., None]
    raw2 = t2 - dot(t2, e1)[..., None] * e1
    e2 = raw2 / norm(raw2)[..., None]
    we1 = np.einsum("...ij,...j->...i", w, e1)
    we2 = np.einsum("...ij,...j->...i", w, e2)
    s11 = dot(we1, e1)
    s12 = dot(we1, e2)
    s22 = dot(we2, e2)
    mid = 0.5 * (s11 + s22)
    rad = np.sqrt(np.maximum(0.25 * (s11 - s22) ** 2 + s12 ** 2, 0.0))
    kappa1 = mid - rad
    kappa2 = mid + rad
    h = np.einsum("...ii->...", w)

    return SurfaceFrame(s=s, y=y, t1=t1, t2=t2, n=n, theta=theta,
                        theta_inv=theta_inv, det_theta=det, second_form=ii,
                        weingarten=w, kappa1=kappa1, kappa2=kappa2,
                        mean_curvature=h, sym_defect=defect)


@dataclasses.dataclass(frozen=True)
class SurfaceQuadrature:
    """Chart nodes with weights that already include sqrt(det theta)."""

    s: np.ndarray             # (N, 2)
    base_weights: np.ndarray  # (N,) parametric weights, no metric factor
    weights: np.ndarray       # (N,) base * sqrt(det theta)
    frames: SurfaceFrame

    @property
    def node_count(self):
        return self.s.shape[0]


class Surface:
    """A closed surface covered by one analytic chart."""

    def __init__(self, chart, preset, params=None, reach=None):
        self.chart = chart
        self.preset = preset
        self.params = dict(params or {})
        self._reach = reach
        self._quads = {}

    @property
    def charts(self):
        return (self.chart,)

    def frame_at(self, s, chart_id=0):
        """Full geometric frame at chart parameters s."""
        del chart_id  # single-chart presets
        return frames_from_chart(self.chart, s)

    def quadrature(self, n1=None, n2=None):
        n1 = DEFAULT_N1 if n1 is None else int(n1)
        n2 = DEFAULT_N2 if n2 is None else int(n2)
        key = (n1, n2)
        if key not in self._quads:
            self._quads[key] = self._build_quadrature(n1, n2)
        return self._quads[key]

    def _build_quadrature(self, n1, n2):
        rules = []
        for k in range(2):
            a, b = self.chart.bounds[k]
            if self.chart.periodic[k]:
                rules.append(quadrules.trapezoid_periodic(n2, a, b))
            else:
                rules.append(quadrules.gauss_legendre(n1, a, b))
        s, base_w = quadrules.tensor_rule(rules[0], rules[1])
        frames = frames_from_chart(self.chart, s)
        weights = base_w * np.sqrt(frames.det_theta)
        return SurfaceQuadrature(s=s, base_weights=base_w, weights=weights,
                                 frames=frames)

    @property
    def reach(self):
        """Lower bound on the tubular-neighborhood radius."""
        if self._reach is None:
            fr = self.quadrature().frames
            kmax = np.max(np.maximum(np.abs(fr.kappa1), np.abs(fr.kappa2)))
            self._reach = 0.5 / kmax
        return self._reach

    def random_params(self, rng, count):
        """Uniform parameter samples, kept away from non-periodic chart edges."""
        out = np.empty((count, 2))
        for k in range(2):
            a, b = self.chart.bounds[k]
            if self.chart.periodic[k]:
                out[:, k] = rng.uniform(a, b, size=count)
            else:
                pad = 0.05 * (b - a)
                out[:, k] = rng.uniform(a + pad, b - pad, size=count)
        return out


# ---------------------------------------------------------------------------
# presets


def sphere():
    """Unit sphere in spherical coordinates (polar angle, azimuth)."""
    def pos(s):
        th, ph = s[..., 0], s[..., 1]
        st, ct = np.sin(th), np.cos(th)
        return np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1)

    def d1(s):
        th, ph = s[..., 0], s[..., 1]
        ct = np.cos(th)
        return np.stack([ct * np.cos(ph), ct * np.sin(ph), -np.sin(th)], axis=-1)

    def d2(s):
        th, ph = s[..., 0], s[..., 1]
        st = np.sin(th)
        return np.stack([-st * np.sin(ph), st * np.cos(ph), np.zeros_like(st)], axis=-1)

    def d11(s):
        return -pos(s)

    def d12(s):
        th, ph = s[..., 0], s[..., 1]
        ct = np.cos(th)
        return np.stack([-ct * np.sin(ph), ct * np.cos(ph), np.zeros_like(ct)], axis=-1)

    def d22(s):
        th, ph = s[..., 0], s[..., 1]
        st = np.sin(th)
        return np.stack([-st * np.cos(ph), -st * np.sin(ph), np.zeros_like(st)], axis=-1)

    chart = Chart(pos, d1, d2, d11, d12, d22,
                  bounds=((0.0, math.pi), (0.0, 2.0 * math.pi)),
                  periodic=(False, True))
    # Closed-form closest-point map pi(x) = x/|x| is valid down to the center,
    # so the tubular radius is 1, not the conservative 0.5/max|kappa|.
    return Surface(chart, "sphere", reach=1.0)


def torus(major_radius=2.0, minor_radius=0.5):
    """Torus of revolution around the x3-axis."""
    big, small = float(major_radius), float(minor_radius)
    if not 0.0 < small < big:
        raise ValueError("torus requires 0 < minor_radius < major_radius")

    def pos(s):
        u, v = s[..., 0], s[..., 1]
        w = big + small * np.cos(u)
        return np.stack([w * np.cos(v), w * np.sin(v), small * np.sin(u)], axis=-1)

    def d1(s):
        u, v = s[..., 0], s[..., 1]
        su = small * np.sin(u)
        return np.stack([-su * np.cos(v), -su * np.sin(v), small * np.cos(u)], axis=-1)

    def d2(s):
        u, v = s[..., 0], s[..., 1]
        w = big + small * np.cos(u)
        return np.stack([-w * np.sin(v), w * np.cos(v), np.zeros_like(w)], axis=-1)

    def d11(s):
        u, v = s[..., 0], s[..., 1]
        cu = small * np.cos(u)
        return np.stack([-cu * np.cos(v), -cu * np.sin(v), -small * np.sin(u)], axis=-1)

    def d12(s):
        u, v = s[..., 0], s[..., 1]
        su = small * np.sin(u)
        return np.stack([su * np.sin(v), -su * np.cos(v), np.zeros_like(su)], axis=-1)

    def d22(s):
        u, v = s[..., 0], s[..., 1]
        w = big + small * np.cos(u)
        return np.stack([-w * np.cos(v), -w * np.sin(v), np.zeros_like(w)], axis=-1)

    chart = Chart(pos, d1, d2, d11, d12, d22,
                  bounds=((0.0, 2.0 * math.pi), (0.0, 2.0 * math.pi)),
                  periodic=(True, True), normal_sign=-1.0)
    return Surface(chart, "torus_of_revolution",
                   params={"major_radius": big, "minor_radius": small})


def revolution_profile(major_radius=2.0, amplitude=0.5, wobble=0.1):
    """Surface of revolution of a closed profile curve around the x3-axis.

    Profile in the (radius, height) half-plane:
        phi(t) = R + a cos t + b cos 2t,   psi(t) = a sin t + b sin 2t.
    wobble = 0 recovers the torus; small nonzero wobble keeps the surface
    embedded while breaking everything except the axial symmetry.
    """
    big, amp, wob = float(major_radius), float(amplitude), float(wobble)
    if not 0.0 < amp < big:
        raise ValueError("revolution profile requires 0 < amplitude < major_radius")
    if abs(wob) > 0.4 * amp:
        raise ValueError("wobble too large for an embedded profile")

    def phi(t):
        return big + amp * np.cos(t) + wob * np.cos(2 * t)

    def dphi(t):
        return -amp * np.sin(t) - 2 * wob * np.sin(2 * t)

    def d2phi(t):
        return -amp * np.cos(t) - 4 * wob * np.cos(2 * t)

    def psi(t):
        return amp * np.sin(t) + wob * np.sin(2 * t)

    def dpsi(t):
        return amp * np.cos(t) + 2 * wob * np.cos(2 * t)

    def d2psi(t):
        return -amp * np.sin(t) - 4 * wob * np.sin(2 * t)

    def pos(s):
        t, v = s[..., 0], s[..., 1]
        return np.stack([phi(t) * np.cos(v), phi(t) * np.sin(v), psi(t)], axis=-1)

    def d1(s):
        t, v = s[..., 0], s[..., 1]
        return np.stack([dphi(t) * np.cos(v), dphi(t) * np.sin(v), dpsi(t)], axis=-1)

    def d2(s):
        t, v = s[..., 0], s[..., 1]
        return np.stack([-phi(t) * np.sin(v), phi(t) * np.cos(v),
                         np.zeros_like(t)], axis=-1)

    def d11(s):
        t, v = s[..., 0], s[..., 1]
        return np.stack([d2phi(t) * np.cos(v), d2phi(t) * np.sin(v), d2psi(t)], axis=-1)

    def d12(s):
        t, v = s[..., 0], s[..., 1]
        return np.stack([-dphi(t) * np.sin(v), dphi(t) * np.cos(v),
                         np.zeros_like(t)], axis=-1)

    def d22(s):
        t, v = s[..., 0], s[..., 1]
        return np.stack([-phi(t) * np.cos(v), -phi(t) * np.sin(v),
                         np.zeros_like(t)], axis=-1)

    chart = Chart(pos, d1, d2, d11, d12, d22,
                  bounds=((0.0, 2.0 * math.pi), (0.0, 2.0 * math.pi)),
                  periodic=(True, True), normal_sign=-1.0)
    return Surface(chart, "revolution_profile",
                   params={"major_radius": big, "amplitude": amp, "wobble": wob})


def ellipsoid(a=1.0, b=1.3, c=1.7):
    """Triaxial ellipsoid with semi-axes (a, b, c)."""
    ax = np.array([float(a), float(b), float(c)])
    if np.any(ax <= 0):
        raise ValueError("semi-axes must be positive")

    def pos(s):
        th, ph = s[..., 0], s[..., 1]
        st = np.sin(th)
        return np.stack([ax[0] * st * np.cos(ph), ax[1] * st * np.sin(ph),
                         ax[2] * np.cos(th)], axis=-1)

    def d1(s):
        th, ph = s[..., 0], s[..., 1]
        ct = np.cos(th)
        return np.stack([ax[0] * ct * np.cos(ph), ax[1] * ct * np.sin(ph),
                         -ax[2] * np.sin(th)], axis=-1)

    def d2(s):
        th, ph = s[..., 0], s[..., 1]
        st = np.sin(th)
        return np.stack([-ax[0] * st * np.sin(ph), ax[1] * st * np.cos(ph),
                         np.zeros_like(st)], axis=-1)

    def d11(s):
        return -pos(s)

    def d12(s):
        th, ph = s[..., 0], s[..., 1]
        ct = np.cos(th)
        return np.stack([-ax[0] * ct * np.sin(ph), ax[1] * ct * np.cos(ph),
                         np.zeros_like(ct)], axis=-1)

    def d22(s):
        th, ph = s[..., 0], s[..., 1]
        st = np.sin(th)
        return np.stack([-ax[0] * st * np.cos(ph), -ax[1] * st * np.sin(ph),
                         np.zeros_like(st)], axis=-1)

    chart = Chart(pos, d1, d2, d11, d12, d22,
                  bounds=((0.0, math.pi), (0.0, 2.0 * math.pi)),
                  periodic=(False, True))
    return Surface(chart, "triaxial_ellipsoid", params={"a": a, "b": b, "c": c})


_PRESETS = {
    "sphere": sphere,
    "torus": torus,
    "torus_of_revolution": torus,
    "revolution_profile": revolution_profile,
    "ellipsoid": ellipsoid,
    "triaxial_ellipsoid": ellipsoid,
}


def make_surface(name, **params):
    if name not in _PRESETS:
        raise ValueError(f"unknown surface preset {name!r}")
    return _PRESETS[name](**params)


# ---------------------------------------------------------------------------
# tangential calculus


def tangential_gradient(frame, d_flat):
    """grad_T eta = theta^{ij} (d eta^flat / d s_i) (d mu / d s_j).

    d_flat holds the chart partials of eta^flat, shape (..., 2); the result is
    tangential by construction.
    """
    coef = np.einsum("...ij,...i->...j", frame.theta_inv, np.asarray(d_flat))
    return coef[..., 0:1] * frame.t1 + coef[..., 1:2] * frame.t2


def tangential_gradient_ambient(frame, grad_ambient):
    """grad_T eta = P grad of any ambient extension of eta."""
    return np.einsum("...ij,...j->...i", frame.P, grad_ambient)


def chart_partials(chart, s, func, step=1e-5):
    """Central-difference chart partials of func(s) with periodic wrapping."""
    outs = []
    for k in range(2):
        e = np.zeros(2)
        e[k] = step
        fp = func(chart.wrap(s + e))
        fm = func(chart.wrap(s - e))
        outs.append((fp - fm) / (2.0 * step))
    return outs


def tangential_vector_gradient(frame, d1_flat, d2_flat):
    """grad_T v with rows of coordinate tangential derivatives.

    d1_flat, d2_flat are the chart partials of v^flat, each shape (..., 3).
    Entry (i, j) is D_i v_j.
    """
    ti = frame.theta_inv
    t = (frame.t1, frame.t2)
    d = (np.asarray(d1_flat), np.asarray(d2_flat))
    out = 0.0
    for k in range(2):
        for el in range(2):
            out = out + ti[..., k, el][..., None, None] * outer(t[el], d[k])
    return out


def surface_divergence(surface, field_flat, s, chart_id=0, step=1e-5):
    """Surface divergence of a tangential field from its chart representation.

    field_flat maps chart parameters (..., 2) to the field values (..., 3).
    Uses the divergence form (det theta)^(-1/2) d_i (X^i sqrt(det theta))
    with central differences in the chart parameters.
    """
    del chart_id
    chart = surface.chart
    frame = frames_from_chart(chart, s)
    x_val = field_flat(np.asarray(s, dtype=float))
    resid = np.abs(dot(x_val, frame.n))
    if np.any(resid > 1e-10 * (1.0 + norm(x_val))):
        raise NotTangential("field has a normal component at the evaluation point")

    def weighted_component(sv, k):
        fr = frames_from_chart(chart, sv)
        x = field_flat(sv)
        comp = (fr.theta_inv[..., k, 0] * dot(fr.t1, x)
                + fr.theta_inv[..., k, 1] * dot(fr.t2, x))
        return comp * np.sqrt(fr.det_theta)

    total = 0.0
    for k in range(2):
        e = np.zeros(2)
        e[k] = step
        plus = weighted_component(chart.wrap(np.asarray(s) + e), k)
        minus = weighted_component(chart.wrap(np.asarray(s) - e), k)
        total = total + (plus - minus) / (2.0 * step)
    return total / np.sqrt(frame.det_theta)


def ambient_surface_divergence(frame, jac_ambient):
    """div_T X = tr[P grad(Xtilde)] for any ambient extension with Jacobian."""
    return np.einsum("...ij,...ji->...", frame.P, np.swapaxes(jac_ambient, -1, -2))


def integrate_surface(quad, f):
    """Integrate f over the surface; f maps node positions (N, 3) to (N,)."""
    vals = np.asarray(f(quad.frames.y), dtype=float)
    if vals.shape != (quad.node_count,):
        raise ValueError("integrand must return one value per node")
    if not np.all(np.isfinite(vals)):
        raise NonFiniteInput("integrand evaluated to a non-finite value")
    return float(np.sum(quad.weights * vals))


def integrate_frames(quad, values):
    """Integrate precomputed nodal values (N,) against the surface measure."""
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("nodal values contain non-finite entries")
    return float(np.sum(quad.weights * values))


def local_frame(frame):
    """Orthonormal tangent pair (tau1, tau2) with {tau1, tau2, n} orthonormal."""
    tau1 = frame.t1 / norm(frame.t1)[..., None]
    raw = frame.t2 - dot(frame.t2, tau1)[..., None] * tau1
    tau2 = raw / norm(raw)[..., None]
    return tau1, tau2
