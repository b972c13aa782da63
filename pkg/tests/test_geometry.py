import io as stdio
import math

import numpy as np
import pytest
import sympy as sp

from zmclab.ck_solver import InitialCurve, ck_solve
from zmclab.errors import (
    IdenticallyLightlike,
    LightlikePoint,
    NotAdmissible,
    NotLightlike,
    NotNormalized,
)
from zmclab.geometry import (
    GraphSurface,
    classify_point,
    extract_admissibility_witness,
    field_A,
    field_B,
    gauss_curvature,
    lightlike_degeneracy,
    mean_curvature,
    normalize,
    rotate,
    sample_grid,
    verify_admissible,
)
from zmclab.series import PowerSeries2

x, y = sp.symbols("x y")


def test_plane_fields_vanish():
    s = GraphSurface.from_series(PowerSeries2.y(6))
    assert field_B(s).is_zero() and field_A(s).is_zero()
    assert lightlike_degeneracy(s) == "degenerate"


def test_closed_form_fields_are_callables():
    cone = GraphSurface.from_expr(sp.sqrt(x**2 + (1 + y) ** 2) - 1)
    X, Y = np.meshgrid(np.linspace(-0.3, 0.3, 7), np.linspace(-0.3, 0.3, 7))
    assert np.max(np.abs(field_B(cone)(X, Y))) < 1e-15


def test_not_normalized():
    with pytest.raises(NotNormalized):
        GraphSurface.from_expr(x + y)


def test_curvature_at_spacelike_point():
    # maximal Scherk surface: H = 0 away from the light-like locus
    s = GraphSurface.from_expr(sp.asin(sp.cos(x) * sp.sin(y)))
    assert mean_curvature(s, (0.2, 0.1)) == pytest.approx(0.0, abs=1e-12)
    p = classify_point(s, (0.2, 0.1))
    assert p.tag == "spacelike"
    assert gauss_curvature(s, (0.2, 0.1)) == pytest.approx(p.K)


def test_curvature_raises_at_lightlike_point():
    s = GraphSurface.from_expr(y + x**2 / 2)
    with pytest.raises(LightlikePoint):
        mean_curvature(s, (0.0, 0.0))
    with pytest.raises(LightlikePoint):
        gauss_curvature(s, (0.0, 0.0))


def test_paraboloid_is_timelike_off_axis():
    # B = -x^2 for f = y + x^2/2
    s = GraphSurface.from_expr(y + x**2 / 2)
    g = sample_grid(s, grid=(11, 11))
    assert set(g.tag[:, 5]) == {"lightlike"}
    assert g.counts() == {"lightlike": 11, "timelike": 110}


def test_grid_csv_is_deterministic(tmp_path):
    s = GraphSurface.from_expr(sp.asinh(sp.cosh(x) * sp.sinh(y)))
    a, b = stdio.StringIO(), stdio.StringIO()
    sample_grid(s, grid=(9, 9)).write_csv(a)
    sample_grid(s, grid=(9, 9), workers=3).write_csv(b)
    assert a.getvalue() == b.getvalue()
    assert a.getvalue().splitlines()[0] == "x,y,f,B,A,H,K,tag"


def test_witness_recovers_phi():
    phi = PowerSeries2.from_terms([(0, 0, 1.0), (1, 0, 0.5), (0, 1, -2.0)], 10)
    g = InitialCurve.from_coeffs([0, 0, 0.3, 0.1], [1, 0.4, -0.2], 12)
    s = ck_solve(g, phi, order=12)
    w = extract_admissibility_witness(s)
    assert abs(w.coeff(0, 0) - 1.0) < 1e-9
    assert abs(w.coeff(1, 0) - 0.5) < 1e-8
    assert abs(w.coeff(0, 1) + 2.0) < 1e-8
    assert verify_admissible(s, phi).passed


def test_witness_errors():
    with pytest.raises(IdenticallyLightlike):
        extract_admissibility_witness(GraphSurface.from_series(PowerSeries2.y(6)))
    # y + x^2/2 + x y^2: A = 2x (1 - ...) starts at degree 1 while B^2 starts at degree 4
    f = PowerSeries2.from_terms([(0, 1, 1.0), (2, 0, 0.5), (1, 2, 1.0)], 8)
    with pytest.raises(NotAdmissible):
        extract_admissibility_witness(GraphSurface.from_series(f))


def test_degeneracy_requires_lightlike_origin():
    s = GraphSurface.from_series(PowerSeries2.from_terms([(0, 1, 0.5)], 4), normalized=False)
    with pytest.raises(NotLightlike):
        lightlike_degeneracy(s)


def test_normalize_round_trip():
    base = GraphSurface.from_expr(sp.asinh(sp.cosh(x) * sp.sinh(y)), series=None)
    tilted = rotate(base, -0.4)
    s, theta, dt = normalize(tilted)
    assert theta == pytest.approx(0.4)
    j = s.jet(0.0, 0.0)
    assert (j.f, j.fx, j.fy) == pytest.approx((0.0, 0.0, 1.0), abs=1e-12)
    # rotating back recovers the original germ
    assert s(0.1, 0.2) == pytest.approx(base(0.1, 0.2), abs=1e-14)
    # rotation is an isometry of R^3_1: B is carried along with the point
    c, si = math.cos(-0.4), math.sin(-0.4)
    X, Y = 0.1, 0.2
    assert tilted.fields(X, Y)[0] == pytest.approx(base.fields(c * X + si * Y, -si * X + c * Y)[0], abs=1e-14)
