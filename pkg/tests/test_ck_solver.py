from fractions import Fraction

import numpy as np
import pytest

from zmclab.ck_solver import (
    InitialCurve,
    LightlikeSeed,
    ck_solve,
    ck_solve_lightlike,
    initial_curve_of,
    is_degenerate_curve,
)
from zmclab.errors import InvalidInitialCurve, OrderTooLow
from zmclab.geometry import lightlike_degeneracy, verify_admissible
from zmclab.series import PowerSeries1, PowerSeries2

# Taylor coefficients of asin(cos x sin y) (mpmath, 40 digits)
SCHERK = {(0, 1): 1.0, (2, 1): -0.5, (2, 3): -1 / 6, (4, 1): 1 / 24}

# undetermined-coefficient solve of A_F = 0 with sympy, gamma = (0, 1 + 3 x^3), order 9
OJM = {(0, 1): 1.0, (3, 1): 3.0, (4, 3): -9.0}

# same with A_F = (1 + x) B_F^2, gamma = (x^2/2 - x^3/5, 1 + 2x/5 - 3x^2/10), order 6
PHI_GERM = {
    (0, 1): "1", (0, 3): "-4/75", (0, 4): "-2/75", (0, 5): "-98/9375", (0, 6): "214/28125",
    (1, 1): "2/5", (1, 3): "22/375", (1, 4): "-34/375", (1, 5): "-826/46875",
    (2, 0): "1/2", (2, 1): "-3/10", (2, 2): "3/10", (2, 3): "-9/250", (2, 4): "-37/250",
    (3, 0): "-1/5", (3, 2): "126/125", (3, 3): "-427/375", (4, 2): "-2271/5000",
}

# sqrt(x^2 + (1 + y)^2) - 1
CONE = {(0, 1): 1.0, (2, 0): 0.5, (2, 1): -0.5, (2, 2): 0.5, (2, 3): -0.5, (2, 4): 0.5,
        (4, 0): -0.125, (4, 1): 0.375, (4, 2): -0.75, (6, 0): 0.0625}


def coeff_error(series, table, order):
    return max(abs(series.coeff(j, k) - float(Fraction(table.get((j, k), 0))))
               for j in range(order + 1) for k in range(order + 1 - j))


def test_plane():
    s = ck_solve(InitialCurve.from_coeffs([0, 0], [1], 8), order=8)
    assert s.series == PowerSeries2.y(8)


def test_scherk_from_cos():
    cos = [0, 0, 0, 0, 0, 0, 0, 0]
    v = [1, 0, -0.5, 0, 1 / 24, 0, -1 / 720, 0]
    s = ck_solve(InitialCurve.from_coeffs(cos[:7], v, 6), order=6)
    assert coeff_error(s.series, SCHERK, 6) < 1e-15


def test_ojm_germ():
    s = ck_solve(InitialCurve.from_coeffs([0, 0], [1, 0, 0, 3], 9), order=9)
    assert coeff_error(s.series, OJM, 9) == 0.0
    assert lightlike_degeneracy(s) == "degenerate"


def test_phi_admissible_germ():
    phi = PowerSeries2.from_terms([(0, 0, 1.0), (1, 0, 1.0)], 6)
    g = InitialCurve.from_coeffs([0, 0, 0.5, -0.2], [1, 0.4, -0.3], 6)
    s = ck_solve(g, phi, order=6)
    assert coeff_error(s.series, PHI_GERM, 6) < 1e-14
    assert verify_admissible(s, phi).max_abs < 1e-14


def test_lightlike_cone():
    psi = PowerSeries1([0, 0, 0.5, 0, -0.125, 0, 0.0625], 6)
    s = ck_solve_lightlike(LightlikeSeed(psi), order=6)
    assert coeff_error(s.series, CONE, 6) < 1e-15
    assert s.B_series.max_abs() < 1e-15


def test_initial_curve_round_trip():
    rng = np.random.default_rng(1)
    u = np.r_[0, 0, rng.uniform(-1, 1, 9)]
    v = np.r_[1, rng.uniform(-1, 1, 9)]
    g = InitialCurve.from_coeffs(u, v, 10)
    back = initial_curve_of(ck_solve(g, 1.0, order=10))
    assert np.max(np.abs(back.u.coeffs - g.u.coeffs)) == 0.0
    assert np.max(np.abs(back.v.coeffs - g.v.coeffs)) == 0.0


def test_invariant_convention():
    g = InitialCurve.from_invariants({2: 1.0, 3: 0.6}, {1: 0.0, 2: -1.0, 4: 2.0}, order=8)
    assert g.u.coeff(3) == pytest.approx(0.2)
    assert g.v.coeff(4) == pytest.approx(0.5)
    assert g.invariant("u", 3) == pytest.approx(0.6)
    assert is_degenerate_curve(g)


def test_invalid_inputs():
    with pytest.raises(InvalidInitialCurve):
        InitialCurve.from_coeffs([0, 0.1], [1], 4)
    with pytest.raises(InvalidInitialCurve):
        InitialCurve.from_coeffs([0, 0], [0.5], 4)
    with pytest.raises(OrderTooLow):
        ck_solve(InitialCurve.from_coeffs([0, 0], [1], 4), order=1)
