"""Scalar fields of a graph immersion ``F = (f(x, y), x, y)`` in R^3_1.

Coordinates of Lorentz-Minkowski space are ``(t, x, y)`` with metric
``-dt^2 + dx^2 + dy^2``.  For a graph over the ``xy``-plane the causal
type, the mean curvature and the Gaussian curvature are governed by

* ``B = 1 - f_x^2 - f_y^2``                     (sign = causal type)
* ``A = (1 - f_x^2) f_yy + 2 f_x f_y f_xy + (1 - f_y^2) f_xx``
* ``C = f_xx f_yy - f_xy^2``

with ``H = A / (2 |B|^{3/2})`` and ``K = -C / B^2`` away from ``B = 0``.

A :class:`GraphSurface` carries a truncated Taylor series at the origin,
a closed-form evaluator of the 2-jet, or both.
"""

import csv
import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import sympy as sp

from .errors import (
    IdenticallyLightlike,
    LightlikePoint,
    NotAdmissible,
    NotLightlike,
    NotNormalized,
)
from .series import PowerSeries2

__all__ = [
    "Jet",
    "GraphSurface",
    "CausalSample",
    "CausalGrid",
    "field_B",
    "field_A",
    "field_C",
    "mean_curvature",
    "gauss_curvature",
    "classify_point",
    "causal_tag",
    "sample_grid",
    "sample_points",
    "lightlike_degeneracy",
    "verify_admissible",
    "AdmissibilityReport",
    "extract_admissibility_witness",
    "rotate",
    "translate",
    "normalize",
]

LIGHTLIKE_TOL = 1e-9
#: |grad B(o)| below this counts as a degenerate light-like point
DEGENERACY_TOL = 1e-12
NORMALIZATION_TOL = 1e-9

Jet = namedtuple("Jet", "f fx fy fxx fxy fyy")


def _jet_fields(j):
    B = 1.0 - j.fx**2 - j.fy**2
    A = (1.0 - j.fx**2) * j.fyy + 2.0 * j.fx * j.fy * j.fxy + (1.0 - j.fy**2) * j.fxx
    C = j.fxx * j.fyy - j.fxy**2
    return B, A, C


class GraphSurface:
    """Graph germ ``t = f(x, y)``.

    Parameters
    ----------
    series : PowerSeries2, optional
        Taylor series of ``f`` at the origin.
    evaluator : callable, optional
        ``evaluator(x, y) -> Jet`` returning ``f`` and its first and second
        partial derivatives, vectorized over numpy arrays.
    name : str
    normalized : bool
        If true, the germ must satisfy ``f(0,0) = f_x(0,0) = 0`` and
        ``f_y(0,0) = 1``; construction raises :class:`NotNormalized` otherwise.
    """

    def __init__(self, series=None, evaluator=None, name="", normalized=True, meta=None):
        if series is None and evaluator is None:
            raise ValueError("need a series, an evaluator, or both")
        self.series = series
        self.evaluator = evaluator
        self.name = name
        self.normalized = normalized
        self.meta = dict(meta or {})
        if normalized:
            j = self.jet(0.0, 0.0)
            bad = (abs(j.f), abs(j.fx), abs(j.fy - 1.0))
            if max(bad) > NORMALIZATION_TOL:
                raise NotNormalized(
                    f"f(0,0)={float(j.f)!r}, f_x(0,0)={float(j.fx)!r}, "
                    f"f_y(0,0)={float(j.fy)!r}"
                )

    @classmethod
    def from_series(cls, series, name="", normalized=True, meta=None):
        return cls(series=series, name=name, normalized=normalized, meta=meta)

    @classmethod
    def from_expr(cls, expr, x=None, y=None, name="", normalized=True, series=None, meta=None):
        """Closed-form surface from a sympy expression in ``x`` and ``y``."""
        x = x or sp.Symbol("x")
        y = y or sp.Symbol("y")
        fx, fy = sp.diff(expr, x), sp.diff(expr, y)
        parts = [expr, fx, fy, sp.diff(fx, x), sp.diff(fx, y), sp.diff(fy, y)]
        funcs = [sp.lambdify((x, y), p, modules="numpy") for p in parts]

        def evaluator(xv, yv):
            xv, yv = np.broadcast_arrays(np.asarray(xv, float), np.asarray(yv, float))
            return Jet(*(np.broadcast_to(np.asarray(fn(xv, yv), float), xv.shape) for fn in funcs))

        meta = dict(meta or {})
        meta.setdefault("expr", expr)
        return cls(series=series, evaluator=evaluator, name=name, normalized=normalized, meta=meta)

    @property
    def order(self):
        return None if self.series is None else self.series.order

    # -- series fields ------------------------------------------------------
    @cached_property
    def _dseries(self):
        f = self.series
        fx, fy = f.diff("x"), f.diff("y")
        return {
            "fx": fx,
            "fy": fy,
            "fxx": fx.diff("x"),
            "fxy": fx.diff("y"),
            "fyy": fy.diff("y"),
        }

    @cached_property
    def B_series(self):
        d = self._dseries
        return 1.0 - d["fx"] * d["fx"] - d["fy"] * d["fy"]

    @cached_property
    def A_series(self):
        d = self._dseries
        fx, fy = d["fx"], d["fy"]
        return (1.0 - fx * fx) * d["fyy"] + 2.0 * fx * fy * d["fxy"] + (1.0 - fy * fy) * d["fxx"]

    @cached_property
    def C_series(self):
        d = self._dseries
        return d["fxx"] * d["fyy"] - d["fxy"] * d["fxy"]

    # -- pointwise evaluation -----------------------------------------------
    def jet(self, x, y):
        if self.evaluator is not None:
            return self.evaluator(x, y)
        d = self._dseries
        return Jet(self.series(x, y), d["fx"](x, y), d["fy"](x, y),
                   d["fxx"](x, y), d["fxy"](x, y), d["fyy"](x, y))

    def fields(self, x, y):
        """Return ``(B, A, C)`` at the given points.

        Series surfaces evaluate the field series directly, which avoids
        the cancellation in ``1 - f_x^2 - f_y^2`` near light-like points.
        """
        if self.evaluator is None:
            return self.B_series(x, y), self.A_series(x, y), self.C_series(x, y)
        return _jet_fields(self.evaluator(x, y))

    def __call__(self, x, y):
        return self.jet(x, y).f

    def __repr__(self):
        kind = "+".join(k for k, v in (("series", self.series), ("closed", self.evaluator)) if v is not None)
        return f"GraphSurface({self.name or '?'}, {kind}, order={self.order})"


def _field(surface, which):
    if surface.series is not None:
        return getattr(surface, f"{which}_series")
    idx = "BAC".index(which)
    return lambda x, y: surface.fields(x, y)[idx]


def field_B(surface):
    """``1 - f_x^2 - f_y^2`` as a series when available, else as a callable."""
    return _field(surface, "B")


def field_A(surface):
    return _field(surface, "A")


def field_C(surface):
    return _field(surface, "C")


def _band(jet, tol):
    return tol * (1.0 + jet.fx**2 + jet.fy**2)


def _point_values(surface, x, y, tol):
    j = surface.jet(x, y)
    B, A, C = surface.fields(x, y)
    return j, float(B), float(A), float(C), float(_band(j, tol))


def mean_curvature(surface, p, tol=LIGHTLIKE_TOL):
    j, B, A, _, band = _point_values(surface, *p, tol)
    if abs(B) <= band:
        raise LightlikePoint(f"B_F({p[0]}, {p[1]}) = {B!r}")
    return A / (2.0 * abs(B) ** 1.5)


def gauss_curvature(surface, p, tol=LIGHTLIKE_TOL):
    j, B, _, C, band = _point_values(surface, *p, tol)
    if abs(B) <= band:
        raise LightlikePoint(f"B_F({p[0]}, {p[1]}) = {B!r}")
    return -C / B**2


def causal_tag(B, band):
    if B > band:
        return "spacelike"
    if B < -band:
        return "timelike"
    return "lightlike"


@dataclass(frozen=True)
class CausalSample:
    x: float
    y: float
    f: float
    B: float
    A: float
    C: float
    tag: str
    H: float = math.nan
    K: float = math.nan


def classify_point(surface, p, tol=LIGHTLIKE_TOL):
    x, y = float(p[0]), float(p[1])
    j, B, A, C, band = _point_values(surface, x, y, tol)
    tag = causal_tag(B, band)
    if tag == "lightlike":
        return CausalSample(x, y, float(j.f), B, A, C, tag)
    return CausalSample(x, y, float(j.f), B, A, C, tag,
                        A / (2.0 * abs(B) ** 1.5), -C / B**2)


@dataclass
class CausalGrid:
    """Vectorized classification of a rectangular sample grid (``[iy, ix]``)."""

    x: np.ndarray
    y: np.ndarray
    f: np.ndarray
    B: np.ndarray
    A: np.ndarray
    H: np.ndarray
    K: np.ndarray
    tag: np.ndarray
    columns: tuple = field(default=("x", "y", "f", "B", "A", "H", "K", "tag"), init=False)

    def rows(self):
        for idx in np.ndindex(self.x.shape):
            yield tuple(getattr(self, c)[idx] for c in self.columns)

    def write_csv(self, path_or_file):
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for row in self.rows():
                w.writerow([_fmt(v) for v in row])
        finally:
            if own:
                fh.close()

    def counts(self):
        tags, n = np.unique(self.tag, return_counts=True)
        return {str(t): int(c) for t, c in zip(tags, n)}


def _fmt(v):
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "NaN"
    return repr(v)


def sample_points(surface, X, Y, tol=LIGHTLIKE_TOL):
    """Classify arbitrary sample arrays ``X``, ``Y`` of equal shape."""
    j = surface.jet(X, Y)
    B, A, C = surface.fields(X, Y)
    band = _band(j, tol)
    tag = np.where(B > band, "spacelike", np.where(B < -band, "timelike", "lightlike"))
    off = tag != "lightlike"
    with np.errstate(divide="ignore", invalid="ignore"):
        H = np.where(off, A / (2.0 * np.abs(B) ** 1.5), np.nan)
        K = np.where(off, -C / B**2, np.nan)
    return CausalGrid(X, Y, np.asarray(j.f, float), B, A, H, K, tag)


def sample_grid(surface, box=(-0.3, 0.3, -0.3, 0.3), grid=(101, 101), tol=LIGHTLIKE_TOL, workers=1):
    """Classify a ``nx`` by ``ny`` grid on ``box = (x0, x1, y0, y1)``.

    With ``workers > 1`` the rows are split across a thread pool; the
    result does not depend on the number of workers.
    """
    x0, x1, y0, y1 = box
    nx, ny = grid
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2 samples per axis")
    X, Y = np.meshgrid(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny))
    if workers <= 1 or ny < 2 * workers:
        return sample_points(surface, X, Y, tol)
    chunks = np.array_split(np.arange(ny), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda rows: sample_points(surface, X[rows], Y[rows], tol), chunks))
    names = ("x", "y", "f", "B", "A", "H", "K", "tag")
    return CausalGrid(*(np.concatenate([getattr(p, n) for p in parts]) for n in names))


def _grad_B_origin(surface):
    if surface.series is not None:
        Bs = surface.B_series
        return Bs.constant, Bs.coeff(1, 0), Bs.coeff(0, 1)
    j = surface.jet(0.0, 0.0)
    B = 1.0 - j.fx**2 - j.fy**2
    Bx = -2.0 * (j.fx * j.fxx + j.fy * j.fxy)
    By = -2.0 * (j.fx * j.fxy + j.fy * j.fyy)
    return float(B), float(Bx), float(By)


def lightlike_degeneracy(surface, tol=LIGHTLIKE_TOL, degeneracy_tol=DEGENERACY_TOL):
    """``'nondegenerate'`` iff ``grad B_F(o) != 0``; requires ``B_F(o) = 0``."""
    B0, Bx, By = _grad_B_origin(surface)
    if abs(B0) > tol:
        raise NotLightlike(f"B_F(0,0) = {B0!r}")
    return "nondegenerate" if math.hypot(Bx, By) > degeneracy_tol else "degenerate"


@dataclass(frozen=True)
class AdmissibilityReport:
    residual: PowerSeries2
    max_abs: float
    tol: float

    @property
    def passed(self):
        return self.max_abs <= self.tol


def _phi_series(phi, order):
    if isinstance(phi, PowerSeries2):
        return phi
    return PowerSeries2.constant_series(float(phi), order)


def verify_admissible(surface, phi, tol=1e-9):
    """Coefficient-wise residual of ``A_F - phi B_F^2``."""
    A = surface.A_series
    phi = _phi_series(phi, A.order)
    res = A - phi * surface.B_series * surface.B_series
    return AdmissibilityReport(res, res.max_abs(), tol)


def _homogeneous_mul_matrix(b, i):
    """Matrix of ``p -> p * b`` on degree-``i`` homogeneous polynomials.

    Both are stored by descending power of ``x``, so the product is a
    plain convolution of the coefficient vectors.
    """
    d = len(b) - 1
    M = np.zeros((i + d + 1, i + 1))
    for col in range(i + 1):
        M[col : col + d + 1, col] = b
    return M


def extract_admissibility_witness(surface, tol=1e-8, zero_tol=1e-12):
    """Find ``phi`` with ``A_F = phi B_F^2`` by a graded least-squares solve.

    Degree ``n`` of the product only involves ``phi`` up to degree
    ``n - d0`` where ``d0`` is the lowest degree present in ``B_F^2``, so
    the unknowns are solved one homogeneous degree at a time.  Returns a
    series of order ``N_A - d0``; raises :class:`NotAdmissible` when a
    degree cannot be matched within ``tol``.
    """
    A = surface.A_series
    M = A.order
    B = surface.B_series.truncate(min(surface.B_series.order, M))
    if B.is_zero(zero_tol):
        raise IdenticallyLightlike("B_F vanishes identically; phi is unconstrained")
    B2 = B * B
    scale = max(1.0, B2.max_abs(), A.max_abs())
    d0 = next((d for d in range(M + 1) if np.max(np.abs(B2.homogeneous(d))) > zero_tol * scale), None)
    if d0 is None:
        # B^2 vanishes to the available order: only A = 0 is checkable
        if A.max_abs() > tol * scale:
            raise NotAdmissible("B_F^2 vanishes to working order but A_F does not")
        return PowerSeries2.zeros(0)
    n_phi = M - d0
    lead = B2.homogeneous(d0)
    phi = np.zeros((n_phi + 1, n_phi + 1))
    for i in range(n_phi + 1):
        n = i + d0
        cur = PowerSeries2(phi, M) * B2
        rhs = A.homogeneous(n) - cur.homogeneous(n)
        mat = _homogeneous_mul_matrix(lead, i)
        sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        resid = np.max(np.abs(mat @ sol - rhs)) if rhs.size else 0.0
        if resid > tol * scale:
            raise NotAdmissible(f"degree {n} residual {resid:.3e} exceeds tolerance")
        for jj, v in enumerate(sol):
            phi[i - jj, jj] = v
    return PowerSeries2(phi, n_phi)


# -- normalization --------------------------------------------------------

def _rotate_jet(j, c, s):
    # (x, y) = (c X + s Y, -s X + c Y); columns of R are d(x,y)/dX, d(x,y)/dY
    fX = c * j.fx - s * j.fy
    fY = s * j.fx + c * j.fy
    fXX = c * c * j.fxx - 2 * c * s * j.fxy + s * s * j.fyy
    fXY = c * s * j.fxx + (c * c - s * s) * j.fxy - c * s * j.fyy
    fYY = s * s * j.fxx + 2 * c * s * j.fxy + c * c * j.fyy
    return Jet(j.f, fX, fY, fXX, fXY, fYY)


def rotate(surface, theta, normalized=False):
    """Compose ``f`` with the rotation ``(X, Y) -> (x, y)`` of angle ``theta``.

    This is a rotation of R^3_1 about the ``t``-axis, hence an isometry.
    """
    c, s = math.cos(theta), math.sin(theta)
    series = None
    if surface.series is not None:
        series = surface.series.linear_substitute(c, s, -s, c)
    evaluator = None
    if surface.evaluator is not None:
        ev = surface.evaluator

        def evaluator(X, Y):
            X, Y = np.asarray(X, float), np.asarray(Y, float)
            return _rotate_jet(ev(c * X + s * Y, -s * X + c * Y), c, s)

    return GraphSurface(series, evaluator, name=surface.name, normalized=normalized, meta=surface.meta)


def translate(surface, dt, normalized=False):
    """Vertical translation ``f -> f + dt``."""
    series = None if surface.series is None else surface.series + dt
    evaluator = None
    if surface.evaluator is not None:
        ev = surface.evaluator

        def evaluator(x, y):
            j = ev(x, y)
            return j._replace(f=j.f + dt)

    return GraphSurface(series, evaluator, name=surface.name, normalized=normalized, meta=surface.meta)


def normalize(surface, tol=LIGHTLIKE_TOL):
    """Translate and rotate so that ``f(0,0)=0, f_x(0,0)=0, f_y(0,0)=1``.

    Returns ``(normalized_surface, theta, dt)``.
    """
    j = surface.jet(0.0, 0.0)
    fx, fy = float(j.fx), float(j.fy)
    if abs(1.0 - fx * fx - fy * fy) > tol:
        raise NotLightlike("origin is not a light-like point; cannot normalize")
    theta = math.atan2(fx, fy)
    out = translate(rotate(surface, theta), -float(j.f))
    return GraphSurface(out.series, out.evaluator, name=surface.name, normalized=True, meta=surface.meta), theta, -float(j.f)
