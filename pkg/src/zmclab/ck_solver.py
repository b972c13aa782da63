"""Power-series construction of admissible germs from initial data.

Given the initial curve ``gamma = (u, v)`` with ``u = f(x, 0)`` and
``v = f_y(x, 0)``, the germ with ``A_F = phi B_F^2`` solves the normal
form

    f_y = g,
    g_y = -(2 f_x g g_x + (1 - g^2) f_xx - (1 - f_x^2 - g^2)^2 phi) / (1 - f_x^2),

and the light-like germ with ``f(x, 0) = psi`` solves ``f_y = sqrt(1 - f_x^2)``.
Both are integrated one power of ``y`` at a time: the ``y**m`` coefficient
of the right-hand side only involves ``y``-coefficients up to ``m``.

The ``(j, k)`` coefficient of ``f`` depends on ``u`` through degree
``j + k`` and on ``v`` through degree ``j + k - 1``, so a total-degree
truncation at order ``N`` is self-consistent.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInitialCurve, OrderTooLow, SeriesBlowup, ZeroConstantTerm
from .geometry import GraphSurface
from .series import DEFAULT_ORDER, PowerSeries1, PowerSeries2, ps_recip, ps_sqrt

__all__ = [
    "InitialCurve",
    "LightlikeSeed",
    "ck_solve",
    "ck_solve_lightlike",
    "initial_curve_of",
    "is_degenerate_curve",
]

#: |gamma'(0)| below this is treated as a degenerate seed
DEGENERATE_SEED_TOL = 1e-12
CURVE_TOL = 1e-12


def _as_series1(s, order):
    if isinstance(s, PowerSeries1):
        return s
    return PowerSeries1(np.atleast_1d(np.asarray(s, dtype=float)), order)


@dataclass(frozen=True)
class InitialCurve:
    """``gamma(x) = (f(x, 0), f_y(x, 0))`` with ``u(0) = u'(0) = 0, v(0) = 1``."""

    u: PowerSeries1
    v: PowerSeries1

    def __post_init__(self):
        if abs(self.u.coeff(0)) > CURVE_TOL or abs(self.u.coeff(1)) > CURVE_TOL:
            raise InvalidInitialCurve("need u(0) = u'(0) = 0")
        if abs(self.v.coeff(0) - 1.0) > CURVE_TOL:
            raise InvalidInitialCurve("need v(0) = 1")

    @classmethod
    def from_coeffs(cls, u, v, order=None):
        """Build from plain Taylor coefficient lists (``u[n]`` multiplies ``x**n``)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if order is None:
            order = max(len(u) - 1, len(v), 1)
        return cls(PowerSeries1(u, order), PowerSeries1(v, max(order - 1, 0)))

    @classmethod
    def from_invariants(cls, us, vs, order=DEFAULT_ORDER):
        """Build from ``gamma = (0, 1) + (0, v_1) x + sum (u_n, v_n) x^n / n``.

        ``us`` and ``vs`` map ``n`` to ``u_n`` / ``v_n``; ``vs`` may hold key 1.
        """
        u = np.zeros(order + 1)
        v = np.zeros(order)
        v[0] = 1.0
        for n, val in dict(us).items():
            if n < 2:
                raise InvalidInitialCurve("u_n is only defined for n >= 2")
            u[n] = val / n
        for n, val in dict(vs).items():
            if n < 1:
                raise InvalidInitialCurve("v_n is only defined for n >= 1")
            v[n] = val if n == 1 else val / n
        return cls(PowerSeries1(u, order), PowerSeries1(v, order - 1))

    def invariant(self, which, n):
        """``u_n`` or ``v_n`` in the ``x^n / n`` convention (``v_1`` is plain)."""
        s = self.u if which == "u" else self.v
        c = s.coeff(n)
        return c if (which == "v" and n == 1) else n * c

    @property
    def velocity(self):
        """``gamma'(0) = (u'(0), v'(0))``."""
        return self.u.coeff(1), self.v.coeff(1)

    def to_dict(self):
        return {"u": [float(c) for c in self.u.coeffs], "v": [float(c) for c in self.v.coeffs]}


def is_degenerate_curve(gamma, tol=DEGENERATE_SEED_TOL):
    return float(np.hypot(*gamma.velocity)) < tol


@dataclass(frozen=True)
class LightlikeSeed:
    """``psi = f(x, 0)`` of a light-like germ; ``psi(0) = psi'(0) = 0``."""

    psi: PowerSeries1

    def __post_init__(self):
        if abs(self.psi.coeff(0)) > CURVE_TOL or abs(self.psi.coeff(1)) > CURVE_TOL:
            raise InvalidInitialCurve("need psi(0) = psi'(0) = 0")


def _phi_series(phi, order):
    if phi is None:
        return None
    if isinstance(phi, PowerSeries2):
        if phi.order < order:
            phi = PowerSeries2(phi.coeffs, order)
        return phi.truncate(order)
    if np.isscalar(phi):
        return None if phi == 0 else PowerSeries2.constant_series(float(phi), order)
    raise TypeError("phi must be a PowerSeries2 or a scalar")


def _check_order(order):
    if order < 2:
        raise OrderTooLow(f"order {order} < 2")


def ck_solve(gamma, phi=0.0, order=DEFAULT_ORDER, name=""):
    """Unique germ with initial curve ``gamma`` and ``A_F = phi B_F^2``.

    Parameters
    ----------
    gamma : InitialCurve
    phi : PowerSeries2 or float
        Taylor series of ``phi`` at the origin (zero gives a ZMC germ).
    order : int
        Total-degree truncation of the returned series.

    Returns
    -------
    GraphSurface
        Series-backed, normalized.
    """
    _check_order(order)
    N = order
    M = N - 2  # working order of the right-hand side
    phi_s = _phi_series(phi, M)

    F = np.zeros((N + 1, N + 1))
    G = np.zeros((N, N))
    u, v = gamma.u.coeffs, gamma.v.coeffs
    F[: min(len(u), N + 1), 0] = u[: N + 1]
    G[: min(len(v), N), 0] = v[:N]
    F[: N, 1] = G[:N, 0]  # f_y = g at y = 0

    for m in range(N - 1):
        f = PowerSeries2(F, N)
        g = PowerSeries2(G, N - 1)
        fx = f.diff("x")
        fxx = fx.diff("x")
        fx = fx.truncate(M)
        g_m = g.truncate(M)
        gx = g.diff("x").truncate(M)
        gg = g_m * g_m
        num = 2.0 * fx * g_m * gx + (1.0 - gg) * fxx
        if phi_s is not None:
            lb = 1.0 - fx * fx - gg
            num = num - lb * lb * phi_s
        try:
            rhs = -(num * ps_recip(1.0 - fx * fx))
        except ZeroConstantTerm as exc:
            raise SeriesBlowup(str(exc)) from exc
        # g_y at y^m fixes g at y^(m+1), which in turn fixes f at y^(m+2)
        col = rhs.coeffs[: M - m + 1, m] / (m + 1)
        G[: M - m + 1, m + 1] = col
        if m + 2 <= N:
            F[: N - m - 1, m + 2] = G[: N - m - 1, m + 1] / (m + 2)

    if not np.all(np.isfinite(F)):
        raise SeriesBlowup("non-finite coefficient in solution")
    meta = {"initial_curve": gamma, "phi": phi}
    return GraphSurface.from_series(PowerSeries2(F, N), name=name, meta=meta)


def ck_solve_lightlike(seed, order=DEFAULT_ORDER, name=""):
    """Unique light-like germ with ``f(x, 0) = psi``: ``f_y = sqrt(1 - f_x^2)``."""
    _check_order(order)
    if not isinstance(seed, LightlikeSeed):
        seed = LightlikeSeed(_as_series1(seed, order))
    N = order
    F = np.zeros((N + 1, N + 1))
    psi = seed.psi.coeffs
    F[: min(len(psi), N + 1), 0] = psi[: N + 1]
    for m in range(N):
        f = PowerSeries2(F, N)
        fx = f.diff("x")
        try:
            fy = ps_sqrt(1.0 - fx * fx)
        except ArithmeticError as exc:
            raise SeriesBlowup(str(exc)) from exc
        F[: N - m, m + 1] = fy.coeffs[: N - m, m] / (m + 1)
    return GraphSurface.from_series(PowerSeries2(F, N), name=name, meta={"psi": seed.psi})


def initial_curve_of(surface):
    """``(f(x, 0), f_y(x, 0))`` of a series-backed germ."""
    f = surface.series
    return InitialCurve(f.col(0), f.diff("y").col(0))
