"""Approximation functions of germs with a degenerate light-like point.

A germ with ``grad B_F(o) = 0`` expands as

    f(x, y) = y + sum_{k >= 2} a_k(y) x^k / k,

where ``alpha = a_2`` and ``beta = a_3`` obey

    alpha' + alpha^2 + mu = 0,        beta'' + 4 alpha beta' = 0

for a constant ``mu`` (the characteristic).  Up to a homothety ``mu`` is
-1, 0 or 1 and the solutions fall into six families::

    plus     mu =  1   alpha = -tan(y + c)
    zeroI    mu =  0   alpha = 0
    zeroII   mu =  0   alpha = 1 / (y + c)
    minusI   mu = -1   alpha = tanh(y + c)
    minusII  mu = -1   alpha = coth(y + c)
    minusIII mu = -1   alpha = +-1

The higher ``a_k`` (``k >= 4``) of a zero mean curvature germ solve the
linear second-order equations

    a_k'' + 2(k-1) a_2 a_k' + k(3-k) a_2' a_k + k (P_k + Q_k - R_k) = 0

whose inhomogeneity only involves ``a_s`` with ``s < k``.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
import sympy as sp

from .ck_solver import initial_curve_of
from .errors import (
    GridTooCoarse,
    NotDegenerate,
    NotSolutionPair,
    ParamOutOfRange,
    SingularCoefficient,
)
from .geometry import GraphSurface, Jet
from .series import DEFAULT_ORDER, PowerSeries1, PowerSeries2

__all__ = [
    "FAMILIES",
    "ApproxFunction",
    "ApproxProfile",
    "profile_of",
    "alpha_closed_form",
    "beta_closed_form",
    "fit_beta",
    "match_alpha_family",
    "pqr_terms",
    "a22_residual",
    "a4_printed_residual",
    "solve_ak_recursion",
    "solve_ak_series",
    "approximation_functions",
    "approximate_surface",
    "homothety",
    "homothety_normalize",
    "characteristic",
    "predict_causal_type",
    "expected_B_on_x_axis",
]

FAMILIES = ("plus", "zeroI", "zeroII", "minusI", "minusII", "minusIII")
FAMILY_MU = {"plus": 1, "zeroI": 0, "zeroII": 0, "minusI": -1, "minusII": -1, "minusIII": -1}

MU_ZERO_TOL = 1e-10
DEGENERATE_TOL = 1e-12
MATCH_TOL = 1e-8

_Y = sp.Symbol("y")


class ApproxFunction:
    """A function of ``y`` with analytic derivatives and a Taylor series.

    Built from a sympy expression in the symbol ``y``.
    """

    def __init__(self, expr, label=""):
        self.expr = sp.sympify(expr)
        self.label = label or str(self.expr)
        self._derivs = {}

    def derivative_expr(self, d):
        e = self.expr
        for _ in range(d):
            e = sp.diff(e, _Y)
        return e

    def __call__(self, y, d=0):
        fn = self._derivs.get(d)
        if fn is None:
            fn = sp.lambdify(_Y, self.derivative_expr(d), modules="numpy")
            self._derivs[d] = fn
        y = np.asarray(y, dtype=float)
        return np.broadcast_to(np.asarray(fn(y), dtype=float), y.shape).copy()

    def series(self, order=DEFAULT_ORDER, y0=0.0):
        fn = sp.lambdify(_Y, self.expr, modules="mpmath")
        with mpmath.workdps(40):
            cs = mpmath.taylor(fn, mpmath.mpf(y0), order)
        return PowerSeries1([float(c) for c in cs], order)

    def __repr__(self):
        return f"ApproxFunction({self.label})"


def _check_family(family):
    if family not in FAMILIES:
        raise ParamOutOfRange(f"unknown family {family!r}; expected one of {FAMILIES}")


def _alpha_expr(family, c):
    _check_family(family)
    y = _Y
    if family == "plus":
        if not abs(c) < math.pi / 2:
            raise ParamOutOfRange("plus family needs |c| < pi/2")
        return -sp.tan(y + c)
    if family == "zeroI":
        return sp.Integer(0)
    if family == "zeroII":
        if c == 0:
            raise ParamOutOfRange("zeroII family needs c != 0")
        return 1 / (y + c)
    if family == "minusI":
        return sp.tanh(y + c)
    if family == "minusII":
        if c == 0:
            raise ParamOutOfRange("minusII family needs c != 0")
        return sp.coth(y + c)
    if c not in (1, -1):
        raise ParamOutOfRange("minusIII takes c = +1 or -1 (the sign of alpha)")
    return sp.Integer(int(c))


def _beta_basis(family, c):
    """Non-constant solution ``b`` of ``b'' + 4 alpha b' = 0`` for the family."""
    y = _Y
    if family == "plus":
        return (2 + sp.sec(y + c) ** 2) * sp.tan(y + c)
    if family == "zeroI":
        return y
    if family == "zeroII":
        return 1 / (y + c) ** 3
    if family == "minusI":
        return (2 + sp.sech(y + c) ** 2) * sp.tanh(y + c)
    if family == "minusII":
        return (2 - sp.csch(y + c) ** 2) * sp.coth(y + c)
    # alpha = sign: b'' + 4 sign b' = 0
    return sp.exp(-4 * int(c) * y)


def _scaled(expr, m, power):
    # homothety by m sends a_k(y) to m^(k-1) a_k(m y); undo it with 1/m
    if m == 1:
        return expr
    return expr.subs(_Y, _Y / m) / sp.Float(m) ** power


def alpha_closed_form(family, c=0.0, scale=1.0):
    """Catalog solution of ``alpha' + alpha^2 + mu = 0`` with ``mu = FAMILY_MU/scale^2``."""
    e = _alpha_expr(family, c)
    return ApproxFunction(_scaled(e, scale, 1), label=f"alpha[{family}, c={c}]")


def beta_closed_form(family, c=0.0, c1=1.0, c2=0.0, scale=1.0):
    """``c1 * b(y) + c2`` with ``b`` the family's non-constant solution."""
    _alpha_expr(family, c)
    e = sp.Float(c1) * _beta_basis(family, c) + sp.Float(c2)
    return ApproxFunction(_scaled(e, scale, 2), label=f"beta[{family}, c={c}, c1={c1}, c2={c2}]")


def fit_beta(family, c, beta0, dbeta0, scale=1.0):
    """Return ``(c1, c2)`` matching ``beta(0) = beta0``, ``beta'(0) = dbeta0``."""
    b = ApproxFunction(_scaled(_beta_basis(family, c), scale, 2))
    b0, db0 = float(b(0.0)), float(b(0.0, 1))
    c1 = dbeta0 / db0
    c2 = (beta0 - c1 * b0) * (scale**2 if scale != 1 else 1.0)
    return c1, c2


def _family_from_alpha0(mu, a0, mu_tol=MU_ZERO_TOL):
    """Family, ``c`` and homothety scale for ``alpha(0) = a0`` at characteristic ``mu``."""
    if mu > mu_tol:
        m = 1.0 / math.sqrt(mu)
        return "plus", -math.atan(m * a0), m
    if mu >= -mu_tol:
        if abs(a0) <= mu_tol:
            return "zeroI", 0.0, 1.0
        return "zeroII", 1.0 / a0, 1.0
    m = 1.0 / math.sqrt(-mu)
    t = m * a0
    if abs(abs(t) - 1.0) <= mu_tol:
        return "minusIII", float(np.sign(t)), m
    if abs(t) < 1.0:
        return "minusI", math.atanh(t), m
    return "minusII", math.atanh(1.0 / t), m


def match_alpha_family(alpha, grid=None, tol=MATCH_TOL, mu_tol=MU_ZERO_TOL):
    """Identify the catalog family of a sampled ``alpha``.

    ``c`` is fitted from ``alpha(0)`` and ``alpha'(0)``; the match holds if
    the sup-norm deviation on ``grid`` is at most ``tol``.

    Returns ``(family, c, scale, deviation, matched)``.
    """
    if grid is None:
        grid = np.linspace(-0.3, 0.3, 601)
    if isinstance(alpha, PowerSeries1):
        a0, da0 = alpha.coeff(0), alpha.coeff(1)
        values = alpha(grid)
    else:
        a0, da0 = float(alpha(0.0)), float(alpha(0.0, 1))
        values = alpha(grid)
    mu = -(da0 + a0 * a0)
    family, c, m = _family_from_alpha0(mu, a0, mu_tol)
    ref = alpha_closed_form(family, c, scale=m)(grid)
    ok = np.isfinite(ref) & np.isfinite(values)
    dev = float(np.max(np.abs(ref[ok] - values[ok]))) if ok.any() else math.inf
    return family, c, m, dev, dev <= tol


@dataclass(frozen=True)
class ApproxProfile:
    mu: float
    delta: float
    Delta: float
    family: str
    c: float
    scale: float = 1.0
    beta_c1: float = 0.0
    beta_c2: float = 0.0
    invariants: dict = field(default_factory=dict)
    a_k: tuple = ()

    @property
    def alpha(self):
        return alpha_closed_form(self.family, self.c, scale=self.scale)

    @property
    def beta(self):
        return beta_closed_form(self.family, self.c, self.beta_c1, self.beta_c2, scale=self.scale)

    def to_dict(self):
        return {
            "mu": self.mu,
            "delta": self.delta,
            "Delta": self.Delta,
            "family": self.family,
            "c": self.c,
            "scale": self.scale,
            "beta_c1": self.beta_c1,
            "beta_c2": self.beta_c2,
        }


def profile_of(gamma, mu_tol=MU_ZERO_TOL, degenerate_tol=DEGENERATE_TOL):
    """Characteristic invariants of the germ with initial curve ``gamma``.

    With ``gamma = (0,1) + (0, v_1) x + sum (u_n, v_n) x^n / n``::

        mu    = -(u_2^2 + v_2)
        delta = 3 u_2 u_3 + v_3
        Delta = 4 u_3^2 + 8 u_2 u_4 + v_2^2 + 2 v_4
    """
    if isinstance(gamma, GraphSurface):
        gamma = initial_curve_of(gamma)
    v1 = gamma.invariant("v", 1)
    if abs(v1) > degenerate_tol:
        raise NotDegenerate(f"v_1 = {v1!r}: the light-like point is non-degenerate")
    u2, u3, u4 = (gamma.invariant("u", n) for n in (2, 3, 4))
    v2, v3, v4 = (gamma.invariant("v", n) for n in (2, 3, 4))
    mu = -(u2 * u2 + v2) + 0.0  # no signed zero
    delta = 3.0 * u2 * u3 + v3
    Delta = 4.0 * u3 * u3 + 8.0 * u2 * u4 + v2 * v2 + 2.0 * v4
    family, c, m = _family_from_alpha0(mu, u2, mu_tol)
    # beta(0) = u_3 and beta'(0) = v_3
    c1, c2 = fit_beta(family, c, u3, v3, scale=m)
    inv = {"u2": u2, "u3": u3, "u4": u4, "v1": v1, "v2": v2, "v3": v3, "v4": v4}
    return ApproxProfile(mu, delta, Delta, family, c, m, c1, c2, inv)


def predict_causal_type(profile, mu_tol=MU_ZERO_TOL, tol=MU_ZERO_TOL):
    """Causal behaviour near the degenerate point from ``mu``, ``delta``, ``Delta``."""
    if "v1" in profile.invariants and abs(profile.invariants["v1"]) > DEGENERATE_TOL:
        raise NotDegenerate("prediction needs a degenerate light-like point")
    if profile.mu > mu_tol:
        return "no_timelike_part"
    if profile.mu < -mu_tol:
        return "no_spacelike_part"
    if abs(profile.delta) > tol:
        return "changes_type"
    if profile.Delta < -tol:
        return "no_timelike_part"
    if profile.Delta > tol:
        return "no_spacelike_part"
    return "indeterminate"


def expected_B_on_x_axis(profile):
    """Coefficients of ``x^0 .. x^4`` in ``B_F(x, 0)`` predicted by the invariants."""
    return np.array([0.0, 0.0, profile.mu, -2.0 * profile.delta / 3.0, -profile.Delta / 4.0])


# -- higher approximation functions ---------------------------------------

def pqr_terms(k, a, da, dda):
    """``(P_k, Q_k, R_k)`` from dicts of ``a_s``, ``a_s'``, ``a_s''`` (``s < k``).

    Values may be floats, numpy arrays or :class:`PowerSeries1`.
    """
    P = 0.0
    for m in range(3, k):
        w = Fraction(2 * (k - 2 * m + 3), k - m + 2)
        if w:
            P = P + float(w) * a[m] * da[k - m + 2]
    Q = 0.0
    R = 0.0
    for m in range(2, k - 1):
        for n in range(2, k - m + 1):
            r = k - m - n + 2
            w = Fraction(3 * n - k + m - 1, m * n)
            if w:
                Q = Q + float(w) * da[m] * da[n] * a[r]
            R = R + (a[m] * a[n] * dda[r]) * (1.0 / r)
    return P, Q, R


def a22_residual(k, a, da, dda):
    """Left-hand side of the ``a_k`` equation; zero for a ZMC germ."""
    P, Q, R = pqr_terms(k, a, da, dda)
    return (dda[k] + (2.0 * (k - 1)) * a[2] * da[k] + float(k * (3 - k)) * da[2] * a[k]
            + float(k) * (P + Q - R))


def a4_printed_residual(a, da, dda):
    """The ``k = 4`` equation in its expanded form."""
    return (dda[4] + 6.0 * a[2] * da[4] - 4.0 * da[2] * a[4] + 3.0 * a[2] * da[2] * da[2]
            - 2.0 * a[2] * a[2] * dda[2] + (8.0 / 3.0) * a[3] * da[3])


def approximation_functions(surface, K=None):
    """``{k: a_k(y)}`` read off a degenerate series germ: ``a_k = k [x^k] f``."""
    f = surface.series
    K = f.order if K is None else K
    return {k: f.row(k) * float(k) for k in range(2, K + 1)}


def _as_fn(a):
    if isinstance(a, ApproxFunction):
        return a
    if isinstance(a, PowerSeries1):
        s = (a, a.diff(), a.diff().diff())
        return lambda y, d=0: s[d](y)
    if np.isscalar(a):
        return lambda y, d=0: np.full(np.shape(y), float(a) if d == 0 else 0.0)
    return a


def solve_ak_recursion(a2, a3, init, K, y_range=(-0.5, 0.5), h=1e-3, pole_margin=0.1, max_step=1e-2):
    """Integrate the ``a_k`` equations for ``k = 4..K`` with classical RK4.

    Parameters
    ----------
    a2, a3 : ApproxFunction, PowerSeries1 or callable ``(y, d) -> value``
        ``alpha`` and ``beta`` with derivatives up to order 2.
    init : dict
        ``{k: (a_k(0), a_k'(0))}`` for ``k = 4..K``.
    y_range : (float, float)
        Integration interval; must contain 0.  Endpoints are pulled in so
        the interval stays ``pole_margin`` away from poles of ``a2``.

    Returns
    -------
    y : ndarray
    tables : dict
        ``{k: (a_k(y), a_k'(y), a_k''(y))}`` for ``k = 2..K``.
    """
    if K < 4:
        raise ValueError("K must be at least 4")
    if not h > 0 or h > max_step:
        raise GridTooCoarse(f"step {h} exceeds {max_step}")
    y0, y1 = y_range
    if not y0 <= 0.0 <= y1:
        raise ValueError("y_range must contain 0")
    A2, A3 = _as_fn(a2), _as_fn(a3)
    y0, y1 = _clip_to_poles(A2, y0, y1, h, pole_margin)
    ks = range(4, K + 1)

    def low(y):
        a = {2: A2(y), 3: A3(y)}
        da = {2: A2(y, 1), 3: A3(y, 1)}
        dda = {2: A2(y, 2), 3: A3(y, 2)}
        return a, da, dda

    def second(y, state):
        a, da, dda = low(y)
        for i, k in enumerate(ks):
            a[k], da[k] = state[2 * i], state[2 * i + 1]
            dda[k] = 0.0
            dda[k] = -a22_residual(k, a, da, dda)
        return a, da, dda

    def rhs(y, state):
        _, _, dda = second(y, state)
        out = np.empty_like(state)
        out[0::2] = state[1::2]
        out[1::2] = [dda[k] for k in ks]
        return out

    s0 = np.array([v for k in ks for v in (float(init[k][0]), float(init[k][1]))])
    n_up = int(round(y1 / h))
    n_dn = int(round(-y0 / h))
    ys = np.arange(-n_dn, n_up + 1) * h
    states = np.empty((len(ys), len(s0)))
    states[n_dn] = s0
    for direction, count in ((1, n_up), (-1, n_dn)):
        s = s0.copy()
        for i in range(count):
            yv = direction * i * h
            hh = direction * h
            k1 = rhs(yv, s)
            k2 = rhs(yv + hh / 2, s + hh / 2 * k1)
            k3 = rhs(yv + hh / 2, s + hh / 2 * k2)
            k4 = rhs(yv + hh, s + hh * k3)
            s = s + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            states[n_dn + direction * (i + 1)] = s
    tables = {}
    a, da, dda = low(ys)
    for k in (2, 3):
        tables[k] = (a[k], da[k], dda[k])
    vals = [second(yv, st) for yv, st in zip(ys, states)]
    for k in ks:
        tables[k] = tuple(np.array([v[i][k] for v in vals], dtype=float) for i in range(3))
    return ys, tables


def _clip_to_poles(A2, y0, y1, h, margin):
    ys = np.arange(y0, y1 + h / 2, h)
    with np.errstate(all="ignore"):
        vals = np.asarray(A2(ys), dtype=float)
    bad = ~np.isfinite(vals) | (np.abs(vals) > 1e8)
    if not bad.any():
        return y0, y1
    if abs(vals[np.argmin(np.abs(ys))]) > 1e8:
        raise SingularCoefficient("alpha has a pole at y = 0")
    poles = ys[bad]
    pos, neg = poles[poles > 0], poles[poles < 0]
    if pos.size:
        y1 = min(y1, pos.min() - margin)
    if neg.size:
        y0 = max(y0, neg.max() + margin)
    if y1 <= 0 and y0 >= 0:
        raise SingularCoefficient("no pole-free interval around 0")
    return min(y0, 0.0), max(y1, 0.0)


def solve_ak_series(a2, a3, init, K, order=DEFAULT_ORDER):
    """Term-wise series solution of the ``a_k`` equations, ``k = 4..K``.

    ``a2`` and ``a3`` are :class:`PowerSeries1` in ``y``; returns
    ``{k: PowerSeries1}`` including ``a2`` and ``a3``.
    """
    a = {2: a2.truncate(min(a2.order, order)), 3: a3.truncate(min(a3.order, order))}
    for k in range(4, K + 1):
        c = np.zeros(order + 1)
        c[0], c[1] = init[k]
        for n in range(order - 1):
            a[k] = PowerSeries1(c, order)
            da = {s: a[s].diff() for s in a}
            dda = {s: da[s].diff() for s in a}
            # the y^n term of the residual is linear in c[n + 2] with slope (n+1)(n+2)
            r = a22_residual(k, a, da, dda)
            c[n + 2] -= r.coeff(n) / ((n + 1) * (n + 2))
        a[k] = PowerSeries1(c, order)
    return a


# -- surfaces from approximation functions ---------------------------------

def _pair_residuals(alpha, beta, order):
    if isinstance(alpha, PowerSeries1) and isinstance(beta, PowerSeries1):
        da, db = alpha.diff(), beta.diff()
        r1 = da.diff() + 2.0 * alpha * da
        r2 = db.diff() + 4.0 * alpha * db
        return r1.max_abs(), r2.max_abs()
    ys = np.linspace(-0.3, 0.3, 201)
    A, Bf = _as_fn(alpha), _as_fn(beta)
    with np.errstate(all="ignore"):
        r1 = A(ys, 2) + 2.0 * A(ys) * A(ys, 1)
        r2 = Bf(ys, 2) + 4.0 * A(ys) * Bf(ys, 1)
    ok = np.isfinite(r1) & np.isfinite(r2)
    return float(np.max(np.abs(r1[ok]))), float(np.max(np.abs(r2[ok])))


def _to_series1(a, order):
    if isinstance(a, PowerSeries1):
        return a
    if isinstance(a, ApproxFunction):
        return a.series(order)
    if np.isscalar(a):
        return PowerSeries1([float(a)], order)
    raise TypeError("need an ApproxFunction, PowerSeries1 or scalar")


def approximate_surface(alpha, beta, order=DEFAULT_ORDER, tol=1e-9):
    """Graph germ ``f = y + alpha(y) x^2 / 2 + beta(y) x^3 / 3``.

    ``alpha`` and ``beta`` must satisfy ``alpha'' + 2 alpha alpha' = 0`` and
    ``beta'' + 4 alpha beta' = 0``; the resulting germ is then admissible.
    """
    sa, sb = _to_series1(alpha, order), _to_series1(beta, order)
    closed = not (isinstance(alpha, PowerSeries1) or isinstance(beta, PowerSeries1))
    r1, r2 = _pair_residuals(alpha if closed else sa, beta if closed else sb, order)
    if max(r1, r2) > tol:
        raise NotSolutionPair(f"ODE residuals {r1:.3e}, {r2:.3e} exceed {tol:g}")
    F = np.zeros((order + 1, order + 1))
    F[0, 1] = 1.0
    n2 = order - 2
    F[2, : n2 + 1] = sa.coeffs[: n2 + 1] / 2.0
    if order >= 3:
        n3 = order - 3
        F[3, : n3 + 1] = sb.coeffs[: n3 + 1] / 3.0
    series = PowerSeries2(F, order)
    evaluator = None
    if closed:
        A, Bt = _as_fn(alpha), _as_fn(beta)

        def evaluator(x, y):
            x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
            a0, a1, a2 = A(y), A(y, 1), A(y, 2)
            b0, b1, b2 = Bt(y), Bt(y, 1), Bt(y, 2)
            x2, x3 = x * x, x * x * x
            return Jet(
                y + a0 * x2 / 2 + b0 * x3 / 3,
                a0 * x + b0 * x2,
                1.0 + a1 * x2 / 2 + b1 * x3 / 3,
                a0 + 2 * b0 * x,
                a1 * x + b1 * x2,
                a2 * x2 / 2 + b2 * x3 / 3,
            )

    return GraphSurface(series, evaluator, name="approximation", normalized=True,
                        meta={"alpha": alpha, "beta": beta})


def homothety(surface, m):
    """``f~(x, y) = f(m x, m y) / m``; multiplies the characteristic by ``m^2``."""
    if not m > 0:
        raise ValueError("homothety factor must be positive")
    series = None
    if surface.series is not None:
        n = surface.series.order
        j, k = np.indices((n + 1, n + 1))
        series = PowerSeries2(surface.series.coeffs * float(m) ** (j + k - 1.0), n)
    evaluator = None
    if surface.evaluator is not None:
        ev = surface.evaluator

        def evaluator(x, y):
            jt = ev(m * np.asarray(x, float), m * np.asarray(y, float))
            return Jet(jt.f / m, jt.fx, jt.fy, m * jt.fxx, m * jt.fxy, m * jt.fyy)

    return GraphSurface(series, evaluator, name=surface.name, normalized=surface.normalized,
                        meta=surface.meta)


def characteristic(surface):
    return profile_of(initial_curve_of(surface)).mu


def homothety_normalize(surface, mu_tol=MU_ZERO_TOL):
    """Rescale so the characteristic becomes -1, 0 or 1; returns ``(surface, m)``."""
    mu = characteristic(surface)
    if abs(mu) <= mu_tol:
        return surface, 1.0
    m = 1.0 / math.sqrt(abs(mu))
    return homothety(surface, m), m
