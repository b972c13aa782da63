"""Null curves, Bjorling-type reconstruction and light-like ruled surfaces.

Points of R^3_1 are arrays whose first axis is ``(t, x, y)``; the
Lorentzian product is ``<a, b> = -a_t b_t + a_x b_x + a_y b_y``.
"""

import math
from dataclasses import dataclass

import numpy as np
import sympy as sp

from .errors import (
    ImaginaryResidue,
    NotAGraph,
    NotLightlike,
    NotNull,
    NotSpacelike,
    ParamOutOfRange,
    RadiusExceeded,
)
from .geometry import causal_tag
from .series import ComplexSeries1, PowerSeries1

__all__ = [
    "lorentz_dot",
    "NullCurve",
    "helicoid_null",
    "bjorling_reconstruct",
    "BjorlingPatch",
    "SpacelikeCurve",
    "RuledLightlike",
    "make_director",
    "ruled_surface_eval",
    "ruled_metric",
    "graph_of_ruled",
    "trace_lightlike_curve",
    "LightlikeTrace",
]

NONDEGENERACY_TOL = 1e-8
NULL_TOL = 1e-10
RADIUS_SAFETY = 0.8


def lorentz_dot(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _stack(parts, shape):
    return np.stack([np.broadcast_to(p, shape) for p in parts])


class NullCurve:
    """Real-analytic curve ``sigma`` with light-like velocity.

    Each component is a :class:`ComplexSeries1` (evaluated by Horner in
    the complex plane) or a numpy-vectorized callable that accepts complex
    arguments.  ``derivatives`` may supply callables for ``sigma'``.
    """

    def __init__(self, components, derivatives=None, radius=None, name=""):
        if len(components) != 3:
            raise ValueError("a curve in R^3_1 has three components")
        self.components = tuple(components)
        if derivatives is None:
            if not all(isinstance(c, ComplexSeries1) for c in components):
                raise ValueError("callable components need explicit derivatives")
            derivatives = tuple(c.diff() for c in components)
        self.derivatives = tuple(derivatives)
        self.name = name
        self._radius = radius

    @property
    def radius(self):
        """Evaluation radius: 0.8 x the coefficient-decay estimate, or user-supplied."""
        if self._radius is not None:
            return self._radius
        ests = [c.radius_estimate() for c in self.components if isinstance(c, ComplexSeries1)]
        ests = [r for r in ests if r is not None]
        return RADIUS_SAFETY * min(ests) if ests else math.inf

    @property
    def center(self):
        for c in self.components:
            if isinstance(c, ComplexSeries1):
                return c.t0
        return 0.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return _stack([c(z) for c in self.components], z.shape)

    def velocity(self, z):
        z = np.asarray(z, dtype=complex)
        return _stack([d(z) for d in self.derivatives], z.shape)

    def acceleration(self, z, h=1e-4):
        z = np.asarray(z, dtype=complex)
        return (self.velocity(z + h) - self.velocity(z - h)) / (2 * h)

    def check(self, u, tol=NULL_TOL, nondeg_tol=NONDEGENERACY_TOL):
        """Verify ``<sigma', sigma'> = 0`` and non-degeneracy at real samples.

        Returns ``(max |<sigma', sigma'>|, min |sigma' x sigma''|)``.
        """
        u = np.asarray(u, dtype=float)
        d1 = self.velocity(u).real
        d2 = self.acceleration(u).real
        null = float(np.max(np.abs(lorentz_dot(d1, d1))))
        cross = float(np.min(np.linalg.norm(np.cross(d1, d2, axis=0), axis=0)))
        if null > tol:
            raise NotNull(f"|<sigma', sigma'>| = {null:.3e}")
        return null, cross

    def is_nondegenerate(self, u, tol=NONDEGENERACY_TOL):
        return self.check(u)[1] >= tol


def helicoid_null(order=40):
    """``sigma(u) = (u, cos u, sin u)`` as Taylor series at 0."""
    cos_c = np.zeros(order + 1)
    sin_c = np.zeros(order + 1)
    for n in range(order + 1):
        c = 1.0 / math.factorial(n)
        if n % 2 == 0:
            cos_c[n] = (-1) ** (n // 2) * c
        else:
            sin_c[n] = (-1) ** (n // 2) * c
    t = np.zeros(order + 1)
    t[1] = 1.0
    return NullCurve([ComplexSeries1(t), ComplexSeries1(cos_c), ComplexSeries1(sin_c)],
                     name="helicoid_null")


@dataclass
class BjorlingPatch:
    """Samples of the reconstructed surface on a ``(u, v)`` grid."""

    u: np.ndarray
    v: np.ndarray
    points: np.ndarray  # (3, *shape)
    tag: np.ndarray
    immersed: np.ndarray
    radius_ok: np.ndarray


def _tangents(sigma, u, w, positive):
    # use w = sqrt(|v|): the Jacobian 2w of v = +-w^2 does not change signs
    if positive:
        zp = u + 1j * w
        Fu = sigma.velocity(zp).real
        Fw = -sigma.velocity(zp).imag
    else:
        d_p, d_m = sigma.velocity(u + w), sigma.velocity(u - w)
        Fu = ((d_p + d_m) / 2).real
        Fw = ((d_p - d_m) / 2).real
    return Fu, Fw


def bjorling_reconstruct(sigma, u, v, imag_tol=1e-10, on_radius="raise", tol=1e-9):
    """Zero mean curvature surface through a non-degenerate null curve.

    ``F(u, v) = (sigma(u + i sqrt v) + sigma(u - i sqrt v)) / 2`` for ``v >= 0``
    and ``(sigma(u + sqrt|v|) + sigma(u - sqrt|v|)) / 2`` for ``v < 0``.

    Parameters
    ----------
    on_radius : {'raise', 'mask'}
        Samples whose shifted arguments leave the series' evaluation disc
        either raise :class:`RadiusExceeded` or are returned as NaN.
    """
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    w = np.sqrt(np.abs(v))
    pos = v >= 0
    shift = np.where(pos, 1j * w, w + 0j)
    zp, zm = u + shift, u - shift
    r = sigma.radius
    c0 = sigma.center
    radius_ok = (np.abs(zp - c0) <= r) & (np.abs(zm - c0) <= r)
    if not radius_ok.all() and on_radius == "raise":
        raise RadiusExceeded(f"{int((~radius_ok).sum())} samples beyond radius {r:.4g}")
    F = (sigma(zp) + sigma(zm)) / 2
    scale = np.maximum(1.0, np.abs(F.real))
    resid = np.abs(F.imag) / scale
    if np.any(resid[:, radius_ok] > imag_tol):
        raise ImaginaryResidue(f"imaginary part {float(resid[:, radius_ok].max()):.3e}")
    pts = F.real.copy()
    pts[:, ~radius_ok] = np.nan

    Fu_p, Fw_p = _tangents(sigma, u, w, True)
    Fu_m, Fw_m = _tangents(sigma, u, w, False)
    Fu = np.where(pos, Fu_p, Fu_m)
    Fw = np.where(pos, Fw_p, Fw_m)
    E, Fm, G = lorentz_dot(Fu, Fu), lorentz_dot(Fu, Fw), lorentz_dot(Fw, Fw)
    det = E * G - Fm * Fm
    band = tol * (1.0 + np.abs(E) * np.abs(G))
    tag = np.vectorize(causal_tag, otypes=[object])(det, band).astype(str)
    immersed = np.linalg.norm(np.cross(Fu, Fw, axis=0), axis=0) > tol
    return BjorlingPatch(u, v, pts, tag, immersed, radius_ok)


# -- light-like ruled surfaces --------------------------------------------

class SpacelikeCurve:
    """Space-like base curve given by position and velocity callables."""

    def __init__(self, position, velocity, interval=(-1.0, 1.0), name="", psi=None):
        self.position = position
        self.velocity = velocity
        self.interval = interval
        self.name = name
        self.psi = psi

    @classmethod
    def ellipse(cls, a=2.0, interval=(-math.pi, math.pi)):
        """``sigma(t) = (0, a cos t, sin t)`` in the ``xy``-plane."""
        def pos(t):
            t = np.asarray(t, float)
            return _stack([0.0, a * np.cos(t), np.sin(t)], t.shape)

        def vel(t):
            t = np.asarray(t, float)
            return _stack([0.0, -a * np.sin(t), np.cos(t)], t.shape)

        return cls(pos, vel, interval, name=f"ellipse a={a}")

    @classmethod
    def graph_base(cls, psi, interval=(-0.5, 0.5)):
        """``sigma(x) = (psi(x), x, 0)``; ``psi`` is a PowerSeries1 or sympy expression in x."""
        if isinstance(psi, PowerSeries1):
            p0, p1, p2 = psi, psi.diff(), psi.diff().diff()
            funcs = (p0, p1, p2)
        else:
            xs = sp.Symbol("x")
            e = sp.sympify(psi)
            funcs = tuple(sp.lambdify(xs, sp.diff(e, xs, d), "numpy") for d in range(3))

        def ev(d, t):
            t = np.asarray(t, float)
            return np.broadcast_to(np.asarray(funcs[d](t), float), t.shape)

        def pos(t):
            t = np.asarray(t, float)
            return _stack([ev(0, t), t, 0.0], t.shape)

        def vel(t):
            t = np.asarray(t, float)
            return _stack([ev(1, t), 1.0, 0.0], t.shape)

        curve = cls(pos, vel, interval, name="graph base", psi=psi)
        curve._dpsi = lambda t: ev(1, t)
        curve._ddpsi = lambda t: ev(2, t)
        return curve

    def __call__(self, t):
        return self.position(t)


def _director(vel, branch):
    a, b, c = vel
    rho2 = b * b + c * c
    disc = rho2 - a * a
    if np.any(disc <= 0):
        raise NotSpacelike("base curve is not space-like on the requested samples")
    rho = np.sqrt(rho2)
    sgn = 1.0 if branch == "+" else -1.0
    root = np.sqrt(disc)
    # light-like (rho, w) with |w| = rho and (b, c).w = a rho
    wx = (a * b - sgn * root * c) / rho
    wy = (a * c + sgn * root * b) / rho
    return np.stack([rho, wx, wy])


@dataclass
class RuledLightlike:
    """``F(t, s) = sigma(t) + s xi(t)`` with ``xi`` light-like and orthogonal to ``sigma'``."""

    base: SpacelikeCurve
    branch: str = "+"
    eps: float = 0.5
    t0: float = 0.0

    def director(self, t):
        t = np.asarray(t, float)
        return _director(self.base.velocity(t), self.branch)

    def director_derivative(self, t, h=1e-3):
        t = np.asarray(t, float)
        d = self.director
        return (-d(t + 2 * h) + 8 * d(t + h) - 8 * d(t - h) + d(t - 2 * h)) / (12 * h)

    def __call__(self, t, s):
        return ruled_surface_eval(self, t, s)


def make_director(base, branch="+", eps=0.5, samples=201, min_eps=1e-6):
    """Light-like ruled surface over ``base``.

    The director is ``xi = (rho, w)`` with ``rho = |(sigma'_x, sigma'_y)|``;
    over a graph base ``(psi, x, 0)`` this is ``(1, psi', +-sqrt(1 - psi'^2))``.
    ``eps`` is halved until the patch is immersed on the sampled interval.
    """
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    t = np.linspace(*base.interval, samples)
    _director(base.velocity(t), branch)  # raises NotSpacelike
    R = RuledLightlike(base, branch, eps)
    while R.eps > min_eps:
        if _immersed(R, t, np.array([-R.eps, R.eps]) * 0.999).all():
            return R
        R = RuledLightlike(base, branch, R.eps / 2)
    raise NotSpacelike("could not find an immersed strip")


def _immersed(R, t, s):
    T, S = np.meshgrid(t, s)
    Ft = R.base.velocity(T) + S * R.director_derivative(T)
    xi = R.director(T)
    return np.linalg.norm(np.cross(Ft, xi, axis=0), axis=0) > 1e-10


def ruled_surface_eval(R, t, s):
    s = np.asarray(s, float)
    if np.any(np.abs(s) >= R.eps):
        raise ParamOutOfRange(f"|s| must stay below eps = {R.eps}")
    t = np.asarray(t, float)
    return R.base.position(t) + s * R.director(t)


def ruled_metric(R, t, s):
    """First fundamental form ``(E, F, G)`` of the ruled patch at ``(t, s)``."""
    t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
    xi = R.director(t)
    Ft = R.base.velocity(t) + s * R.director_derivative(t)
    return lorentz_dot(Ft, Ft), lorentz_dot(Ft, xi), lorentz_dot(xi, xi)


def graph_of_ruled(R, x, y, tol=1e-12, max_iter=50):
    """Re-express the ruled patch as ``t = f(x, y)`` by damped Newton iteration.

    Solves ``(F_x, F_y)(t, s) = (x, y)`` for ``(t, s)`` near ``(t0, 0)``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    t0 = R.t0

    def jac(t, s):
        Ft = R.base.velocity(t) + s * R.director_derivative(t)
        xi = R.director(t)
        return Ft[1:], xi[1:]

    c0, xi0 = jac(np.asarray(t0), np.asarray(0.0))
    J0 = np.array([[c0[0], xi0[0]], [c0[1], xi0[1]]], dtype=float)
    if abs(np.linalg.det(J0)) < 1e-12:
        raise NotAGraph("projection to the xy-plane is singular at the base point")
    p0 = R.base.position(np.asarray(t0))[1:]
    guess = np.linalg.solve(J0, np.stack([x.ravel() - p0[0], y.ravel() - p0[1]]))
    t = t0 + guess[0]
    s = guess[1]
    for _ in range(max_iter):
        P = R.base.position(t) + s * R.director(t)
        rx, ry = P[1] - x.ravel(), P[2] - y.ravel()
        if max(np.max(np.abs(rx)), np.max(np.abs(ry))) < tol:
            break
        (a, c), (b, d) = jac(t, s)
        det = a * d - b * c
        if np.any(np.abs(det) < 1e-14):
            raise NotAGraph("projection Jacobian became singular")
        dt = (d * rx - b * ry) / det
        ds = (-c * rx + a * ry) / det
        step = np.minimum(1.0, 0.5 / np.maximum(np.abs(dt), np.abs(ds)).clip(min=1e-300))
        t = t - step * dt
        s = s - step * ds
    else:
        raise NotAGraph("Newton iteration did not converge")
    if np.any(np.abs(s) >= R.eps):
        raise ParamOutOfRange("sample lies outside the ruled strip |s| < eps")
    f = R.base.position(t)[0] + s * R.director(t)[0]
    return f.reshape(x.shape)


# -- level-set tracing at a non-degenerate light-like point ---------------

@dataclass
class LightlikeTrace:
    """Points ``(x, y)`` on ``B_F = 0`` and the image curve ``sigma = F(x, y)``."""

    xy: np.ndarray  # (n, 2), ordered along the curve
    index_o: int
    sigma: np.ndarray  # (n, 3)
    velocity: np.ndarray  # (n, 3), unit speed in the xy-projection
    normals: np.ndarray  # (n, 2), unit grad B

    def null_residual(self):
        return np.abs(lorentz_dot(self.velocity.T, self.velocity.T))

    def acceleration(self, h):
        v = self.velocity
        acc = np.full_like(v, np.nan)
        acc[1:-1] = (v[2:] - v[:-2]) / (2 * h)
        return acc

    def nondegeneracy(self, h):
        """``|sigma' x sigma''|`` (Euclidean) along the interior samples."""
        acc = self.acceleration(h)
        return np.linalg.norm(np.cross(self.velocity, acc), axis=1)


def trace_lightlike_curve(surface, step=1e-3, n_steps=200, newton_tol=1e-12, max_newton=20):
    """Follow ``B_F = 0`` through ``o`` by predictor-corrector continuation.

    Needs ``grad B_F(o) != 0``.  Each step moves ``step`` along the level
    set tangent and projects back with Newton steps along ``grad B_F``.
    """
    if surface.series is None:
        raise ValueError("tracing needs a series-backed surface")
    B = surface.B_series
    Bx, By = B.diff("x"), B.diff("y")
    if abs(B.constant) > 1e-9:
        raise NotLightlike("B_F(o) != 0")
    if math.hypot(Bx.constant, By.constant) < 1e-12:
        raise NotLightlike("o is a degenerate light-like point; no level curve to trace")

    def grad(p):
        return np.array([float(Bx(*p)), float(By(*p))])

    def tangent(p, prev=None):
        g = grad(p)
        tvec = np.array([-g[1], g[0]]) / np.hypot(*g)
        if prev is not None and np.dot(tvec, prev) < 0:
            tvec = -tvec
        return tvec

    def correct(p):
        for _ in range(max_newton):
            b = float(B(*p))
            if abs(b) < newton_tol:
                return p
            g = grad(p)
            p = p - b * g / np.dot(g, g)
        return p

    origin = np.zeros(2)
    t_o = tangent(origin)
    branches = []
    for sgn in (1.0, -1.0):
        pts = []
        p, tv = origin, sgn * t_o
        for _ in range(n_steps):
            p = correct(p + step * tv)
            tv = tangent(p, tv)
            pts.append(p)
        branches.append(pts)
    xy = np.array(branches[1][::-1] + [origin] + branches[0])
    idx = n_steps
    f = surface.series
    fx, fy = f.diff("x"), f.diff("y")
    sigma = np.column_stack([f(xy[:, 0], xy[:, 1]), xy])
    tans = np.array([tangent(p, t_o) for p in xy])
    dt = fx(xy[:, 0], xy[:, 1]) * tans[:, 0] + fy(xy[:, 0], xy[:, 1]) * tans[:, 1]
    vel = np.column_stack([dt, tans])
    normals = np.array([grad(p) / np.hypot(*grad(p)) for p in xy])
    return LightlikeTrace(xy, idx, sigma, vel, normals)
