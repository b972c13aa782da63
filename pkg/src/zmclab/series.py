"""Truncated formal power series in one and two real variables.

Bivariate series use total-degree truncation: a series of order ``N``
stores the coefficients ``c[j, k]`` of ``x**j * y**k`` for ``j + k <= N``.
The backing array is square, ``(N + 1, N + 1)``, and every entry with
``j + k > N`` is held at zero.

All series are immutable; arithmetic returns new objects.  Binary
operations truncate to the smaller order of the two operands.

Examples
--------
>>> x, y = PowerSeries2.x(4), PowerSeries2.y(4)
>>> f = y + x * x / 2
>>> (f * f).coeff(2, 1)
1.0
"""

import json
import math

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.signal import convolve2d

from .errors import NonPositiveConstantTerm, NotDivisible, ZeroConstantTerm

__all__ = [
    "DEFAULT_ORDER",
    "PowerSeries1",
    "PowerSeries2",
    "ComplexSeries1",
    "ps_mul",
    "ps_recip",
    "ps_sqrt",
    "ps_diff",
    "divide_by_x_power",
]

DEFAULT_ORDER = 12

#: constant terms smaller than this are treated as zero by recip/sqrt
ZERO_TOL = 1e-14
#: relative threshold used by the divisibility test
DIVISIBILITY_TOL = 1e-9


def _triangle_mask(n):
    j, k = np.indices((n + 1, n + 1))
    return (j + k) <= n


class _Series:
    """Shared arithmetic for the real series types.

    Subclasses provide ``_conv`` (the truncated Cauchy product on raw
    coefficient arrays), ``_resize`` and ``_wrap``.
    """

    __slots__ = ("_c", "_order")

    def __init__(self, coeffs, order=None):
        raise NotImplementedError

    @property
    def order(self):
        return self._order

    @property
    def coeffs(self):
        """Read-only view of the coefficient array."""
        return self._c

    @property
    def constant(self):
        return float(self._c.flat[0])

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        if np.isscalar(other):
            return type(self).constant_series(float(other), self._order)
        return NotImplemented

    def _binary_orders(self, other):
        n = min(self._order, other._order)
        return n, self._resize(n), other._resize(n)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n, a, b = self._binary_orders(other)
        return self._wrap(a + b, n)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n, a, b = self._binary_orders(other)
        return self._wrap(a - b, n)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self._wrap(-self._c, self._order)

    def __mul__(self, other):
        if np.isscalar(other):
            return self._wrap(self._c * float(other), self._order)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n, a, b = self._binary_orders(other)
        return self._wrap(self._conv(a, b, n), n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return self._wrap(self._c / float(other), self._order)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * ps_recip(other)

    def __rtruediv__(self, other):
        return ps_recip(self) * other

    def __pow__(self, p):
        if not isinstance(p, (int, np.integer)) or p < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = type(self).constant_series(1.0, self._order)
        base = self
        while p:
            if p & 1:
                out = out * base
            p >>= 1
            if p:
                base = base * base
        return out

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self._order == other._order and np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash((self._order, self._c.tobytes()))

    def truncate(self, order):
        if order > self._order:
            raise ValueError(f"cannot raise truncation order {self._order} -> {order}")
        return self._wrap(self._resize(order), order)

    def max_abs(self):
        return float(np.max(np.abs(self._c)))

    def allclose(self, other, atol=1e-12, rtol=0.0):
        other = self._coerce(other)
        n, a, b = self._binary_orders(other)
        return bool(np.allclose(a, b, atol=atol, rtol=rtol))


class PowerSeries1(_Series):
    """Univariate series ``c_0 + c_1 t + ... + c_N t**N``."""

    __slots__ = ()

    def __init__(self, coeffs, order=None):
        c = np.array(coeffs, dtype=float).ravel()
        if order is None:
            order = len(c) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        out = np.zeros(order + 1)
        m = min(len(c), order + 1)
        out[:m] = c[:m]
        out.flags.writeable = False
        self._c = out
        self._order = int(order)

    @classmethod
    def constant_series(cls, value, order):
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c, order)

    @classmethod
    def t(cls, order):
        return cls([0.0, 1.0], order)

    @classmethod
    def _wrap(cls, arr, order):
        return cls(arr, order)

    def _resize(self, n):
        return self._c[: n + 1].copy()

    @staticmethod
    def _conv(a, b, n):
        return np.convolve(a, b)[: n + 1]

    def coeff(self, k):
        return float(self._c[k]) if k <= self._order else 0.0

    def __len__(self):
        return self._order + 1

    def __call__(self, t):
        return P.polyval(np.asarray(t, dtype=float), self._c)

    def diff(self):
        if self._order == 0:
            return PowerSeries1([0.0], 0)
        return PowerSeries1(self._c[1:] * np.arange(1, self._order + 1), self._order - 1)

    def integrate(self, constant=0.0):
        c = np.empty(self._order + 2)
        c[0] = constant
        c[1:] = self._c / np.arange(1, self._order + 2)
        return PowerSeries1(c, self._order + 1)

    def __repr__(self):
        return f"PowerSeries1(order={self._order}, coeffs={self._c.tolist()})"

    def to_dict(self):
        return {"order": self._order, "coeffs": [float(c) for c in self._c]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["coeffs"], int(d.get("order", len(d["coeffs"]) - 1)))


class PowerSeries2(_Series):
    """Bivariate series truncated at total degree ``order``.

    Parameters
    ----------
    coeffs : array_like
        Square or rectangular array indexed ``[j, k]`` for ``x**j y**k``.
        Entries with ``j + k > order`` are dropped.
    order : int, optional
        Truncation degree.  Defaults to ``coeffs.shape[0] - 1``.
    """

    __slots__ = ()

    def __init__(self, coeffs, order=None):
        c = np.atleast_2d(np.array(coeffs, dtype=float))
        if order is None:
            order = max(c.shape) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        out = np.zeros((order + 1, order + 1))
        mj = min(c.shape[0], order + 1)
        mk = min(c.shape[1], order + 1)
        out[:mj, :mk] = c[:mj, :mk]
        out[~_triangle_mask(order)] = 0.0
        out.flags.writeable = False
        self._c = out
        self._order = int(order)

    @classmethod
    def constant_series(cls, value, order):
        c = np.zeros((order + 1, order + 1))
        c[0, 0] = value
        return cls(c, order)

    @classmethod
    def zeros(cls, order):
        return cls(np.zeros((order + 1, order + 1)), order)

    @classmethod
    def x(cls, order):
        c = np.zeros((order + 1, order + 1))
        if order >= 1:
            c[1, 0] = 1.0
        return cls(c, order)

    @classmethod
    def y(cls, order):
        c = np.zeros((order + 1, order + 1))
        if order >= 1:
            c[0, 1] = 1.0
        return cls(c, order)

    @classmethod
    def from_terms(cls, terms, order):
        """Build from an iterable of ``(j, k, c)`` triples."""
        c = np.zeros((order + 1, order + 1))
        for j, k, v in terms:
            j, k = int(j), int(k)
            if j < 0 or k < 0:
                raise ValueError("negative exponent")
            if j + k <= order:
                c[j, k] += float(v)
        return cls(c, order)

    @classmethod
    def from_x_series(cls, s, order=None):
        """Embed a univariate series in ``x``."""
        order = s.order if order is None else order
        c = np.zeros((order + 1, order + 1))
        m = min(s.order, order) + 1
        c[:m, 0] = s.coeffs[:m]
        return cls(c, order)

    @classmethod
    def from_y_series(cls, s, order=None):
        order = s.order if order is None else order
        c = np.zeros((order + 1, order + 1))
        m = min(s.order, order) + 1
        c[0, :m] = s.coeffs[:m]
        return cls(c, order)

    @classmethod
    def _wrap(cls, arr, order):
        return cls(arr, order)

    def _resize(self, n):
        out = self._c[: n + 1, : n + 1].copy()
        out[~_triangle_mask(n)] = 0.0
        return out

    @staticmethod
    def _conv(a, b, n):
        # direct summation keeps results deterministic and exact zeros exact
        return convolve2d(a, b)[: n + 1, : n + 1]

    def coeff(self, j, k):
        if j + k > self._order:
            return 0.0
        return float(self._c[j, k])

    def terms(self, nonzero=True):
        n = self._order
        for d in range(n + 1):
            for j in range(d, -1, -1):
                v = float(self._c[j, d - j])
                if v != 0.0 or not nonzero:
                    yield j, d - j, v

    def homogeneous(self, d):
        """Coefficients of the degree-``d`` part, ordered by descending x power."""
        return np.array([self._c[j, d - j] for j in range(d, -1, -1)])

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return P.polyval2d(x, y, self._c)

    def diff(self, var):
        """Formal partial derivative along ``'x'`` or ``'y'`` (or axis 0/1)."""
        axis = {"x": 0, "y": 1, 0: 0, 1: 1}[var]
        n = self._order
        if n == 0:
            return PowerSeries2.zeros(0)
        idx = np.arange(1, n + 1, dtype=float)
        if axis == 0:
            c = self._c[1:, :n] * idx[:, None]
        else:
            c = self._c[:n, 1:] * idx[None, :]
        return PowerSeries2(c, n - 1)

    def integrate_y(self, x_series=None):
        """Antiderivative in ``y`` with ``x``-dependent constant ``x_series``."""
        n = self._order + 1
        c = np.zeros((n + 1, n + 1))
        c[:n, 1:] = self._c / np.arange(1, n + 1, dtype=float)[None, :]
        if x_series is not None:
            m = min(x_series.order, n) + 1
            c[:m, 0] = x_series.coeffs[:m]
        return PowerSeries2(c, n)

    def row(self, j):
        """Coefficient of ``x**j`` as a series in ``y`` (order ``N - j``)."""
        n = self._order
        if j > n:
            return PowerSeries1([0.0], 0)
        return PowerSeries1(self._c[j, : n - j + 1], n - j)

    def col(self, k):
        """Coefficient of ``y**k`` as a series in ``x`` (order ``N - k``)."""
        n = self._order
        if k > n:
            return PowerSeries1([0.0], 0)
        return PowerSeries1(self._c[: n - k + 1, k], n - k)

    def at_y0(self):
        return self.col(0)

    def at_x0(self):
        return self.row(0)

    def linear_substitute(self, a, b, c, d):
        """Return ``s(a x + b y, c x + d y)``, exact in the truncated ring."""
        n = self._order
        X = PowerSeries2.from_terms([(1, 0, a), (0, 1, b)], n)
        Y = PowerSeries2.from_terms([(1, 0, c), (0, 1, d)], n)
        xp = [PowerSeries2.constant_series(1.0, n)]
        yp = [PowerSeries2.constant_series(1.0, n)]
        for _ in range(n):
            xp.append(xp[-1] * X)
            yp.append(yp[-1] * Y)
        out = np.zeros((n + 1, n + 1))
        for j, k, v in self.terms():
            out += v * (xp[j] * yp[k]).coeffs
        return PowerSeries2(out, n)

    def is_zero(self, atol=0.0):
        return bool(np.all(np.abs(self._c) <= atol))

    def __repr__(self):
        shown = ", ".join(f"{v:+.6g}*x^{j}y^{k}" for j, k, v in self.terms())
        return f"PowerSeries2(order={self._order}: {shown or '0'})"

    def to_dict(self):
        return {"order": self._order, "coeffs": [[j, k, v] for j, k, v in self.terms()]}

    @classmethod
    def from_dict(cls, d):
        return cls.from_terms(d["coeffs"], int(d["order"]))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def ps_mul(a, b):
    return a * b


def ps_diff(a, var):
    return a.diff(var)


def ps_recip(a, tol=ZERO_TOL):
    """Multiplicative inverse by Newton iteration ``b <- b (2 - a b)``.

    The error series ``1 - a b`` gains at least twice its lowest degree
    each step, so ``ceil(log2(N + 1))`` steps reach the truncation order.
    """
    a0 = a.constant
    if not abs(a0) > tol:
        raise ZeroConstantTerm(f"constant term {a0!r} is below {tol:g}")
    n = a.order
    b = type(a).constant_series(1.0 / a0, n)
    steps = max(1, math.ceil(math.log2(n + 1))) if n > 0 else 0
    for _ in range(steps):
        b = b + b * (1.0 - a * b)
    return b


def ps_sqrt(a, tol=ZERO_TOL):
    """Principal square root via Newton iteration on ``a**(-1/2)``."""
    a0 = a.constant
    if not a0 > tol:
        raise NonPositiveConstantTerm(f"constant term {a0!r} must be positive")
    n = a.order
    r = type(a).constant_series(1.0 / math.sqrt(a0), n)
    steps = max(1, math.ceil(math.log2(n + 1))) if n > 0 else 0
    for _ in range(steps):
        r = r + r * (1.0 - a * r * r) * 0.5
    return a * r


def divide_by_x_power(g, k, tol=DIVISIBILITY_TOL):
    """Return ``h`` with ``g = x**(k+1) * h``.

    Rows ``j = 0..k`` of ``g`` (the ``x**j`` coefficients) must vanish,
    relative to the largest coefficient of ``g``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    c = g.coeffs
    scale = g.max_abs()
    head = np.abs(c[: k + 1])
    if scale > 0 and np.max(head) > tol * scale:
        j, kk = np.unravel_index(np.argmax(head), head.shape)
        raise NotDivisible(f"coefficient of x^{j} y^{kk} is {c[j, kk]!r}, not zero")
    n = g.order - (k + 1)
    if n < 0:
        return PowerSeries2.zeros(0)
    return PowerSeries2(c[k + 1 :, : n + 1], n)


class ComplexSeries1:
    """Complex-coefficient series in ``(z - t0)``, used for analytic continuation."""

    __slots__ = ("_c", "t0")

    def __init__(self, coeffs, t0=0.0):
        c = np.array(coeffs, dtype=complex).ravel()
        c.flags.writeable = False
        self._c = c
        self.t0 = float(t0)

    @property
    def coeffs(self):
        return self._c

    @property
    def order(self):
        return len(self._c) - 1

    @classmethod
    def from_real(cls, s, t0=0.0):
        return cls(s.coeffs, t0)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex) - self.t0
        out = np.zeros(z.shape, dtype=complex) + self._c[-1]
        for c in self._c[-2::-1]:
            out = out * z + c
        return out

    def diff(self):
        n = self.order
        if n == 0:
            return ComplexSeries1([0.0], self.t0)
        return ComplexSeries1(self._c[1:] * np.arange(1, n + 1), self.t0)

    def radius_estimate(self):
        """``(|c_n| / |c_k|) ** (-1 / (n - k))`` over the first (k >= 1) and last nonzero coefficients.

        This is ``(|c_N| / |c_1|) ** (-1 / (N - 1))`` when both ends are
        nonzero; zeros from parity (sin, cos) are skipped.  ``None`` when
        fewer than two nonzero coefficients of positive degree exist.
        """
        nz = np.flatnonzero(np.abs(self._c[1:]) > 0) + 1
        if len(nz) < 2:
            return None
        k, n = int(nz[0]), int(nz[-1])
        return float((abs(self._c[n]) / abs(self._c[k])) ** (-1.0 / (n - k)))

    def __repr__(self):
        return f"ComplexSeries1(t0={self.t0}, order={self.order})"
