"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict that is printed in the terminal
summary, then asserts it.
"""

import csv
import math

import numpy as np
import sympy as sp

from zmclab.approx import (
    ApproxFunction,
    a4_printed_residual,
    a22_residual,
    characteristic,
    expected_B_on_x_axis,
    homothety,
    profile_of,
    solve_ak_recursion,
)
from zmclab.ck_solver import InitialCurve, ck_solve, ck_solve_lightlike, initial_curve_of
from zmclab.cli import main
from zmclab.curves import (
    SpacelikeCurve,
    bjorling_reconstruct,
    graph_of_ruled,
    helicoid_null,
    make_director,
    trace_lightlike_curve,
)
from zmclab.gallery import X, Y, get_entry
from zmclab.geometry import GraphSurface, classify_point, field_A, gauss_curvature, verify_admissible
from zmclab.series import PowerSeries1, PowerSeries2

SIX = ["plane", "lightcone", "paraboloid_y_x2", "scherk_spacelike", "scherk_timelike1", "scherk_timelike2"]


def random_curve(rng, N, degenerate):
    u = np.r_[0.0, 0.0, rng.uniform(-1, 1, N - 1)]
    v = np.r_[1.0, 0.0 if degenerate else rng.uniform(-1, 1), rng.uniform(-1, 1, N - 2)]
    return InitialCurve.from_coeffs(u, v, N)


def test_01_gallery_zmc_residual(acceptance):
    g = np.linspace(-0.3, 0.3, 101)
    Xg, Yg = np.meshgrid(g, g)
    worst = {}
    for name in SIX:
        s = GraphSurface.from_expr(get_entry(name).expr, X, Y)
        worst[name] = float(np.max(np.abs(field_A(s)(Xg, Yg))))
    m = max(worst.values())
    assert acceptance(1, "gallery ZMC residual", m <= 1e-9, f"max |A_F| = {m:.2e} (tol 1e-9)")


def test_02_alpha_beta_oracle(acceptance):
    from zmclab.gallery import _y_grid

    devs, notes = {}, []
    for name in SIX:
        e = get_entry(name)
        ys = _y_grid(e.alpha, e.printed_alpha)
        if name == "scherk_timelike1":
            # recomputed value is the oracle; the printed coth(y) is reported
            oracle = lambda y: 1.0 / np.tanh(y + 1.0)  # noqa: E731
            devs[name] = float(np.max(np.abs(e.alpha(ys) - oracle(ys))))
            notes.append(f"printed alpha off by {np.max(np.abs(e.alpha(ys) - e.printed_alpha(ys))):.2f}")
        else:
            devs[name] = float(np.max(np.abs(e.alpha(ys) - e.printed_alpha(ys))))
        devs[name] = max(devs[name], float(np.max(np.abs(e.beta(ys) - e.printed_beta(ys)))))
    m = max(devs.values())
    assert acceptance(2, "alpha/beta oracle", m <= 1e-8,
                      f"sup dev {m:.2e} (tol 1e-8); scherk_timelike1 {notes[0]}")


def test_03_ck_round_trip(acceptance):
    N = 10
    rng = np.random.default_rng(20261018)
    phis = [0.0, 1.0, PowerSeries2.from_terms([(1, 0, 1.0), (0, 1, 1.0)], N)]
    rt, res = 0.0, 0.0
    for degenerate in (True, False):
        for _ in range(50):
            g = random_curve(rng, N, degenerate)
            for phi in phis:
                s = ck_solve(g, phi, order=N)
                b = initial_curve_of(s)
                rt = max(rt, np.max(np.abs(b.u.coeffs - g.u.coeffs)), np.max(np.abs(b.v.coeffs - g.v.coeffs)))
                res = max(res, verify_admissible(s, phi).max_abs)
    ok = rt <= 1e-12 and res <= 1e-9
    assert acceptance(3, "CK round trip", ok, f"gamma error {rt:.1e} (1e-12), residual {res:.1e} (1e-9), 300 germs")


def test_04_degenerate_seed_contains_line(acceptance):
    N = 10
    rng = np.random.default_rng(4)
    phis = [0.0, 1.0, PowerSeries2.from_terms([(1, 0, 1.0), (0, 1, 1.0)], N)]
    worst = 0.0
    for _ in range(30):
        g = random_curve(rng, N, True)
        for phi in phis:
            s = ck_solve(g, phi, order=N).series
            r0 = s.row(0).coeffs.copy()
            r0[1] -= 1.0
            worst = max(worst, np.max(np.abs(r0)), np.max(np.abs(s.row(1).coeffs)))
    assert acceptance(4, "degenerate seed: f(0,y) = y, f_x(0,y) = 0", worst == 0.0,
                      f"largest coefficient of f(0,y) - y, f_x(0,y): {worst!r}")


def test_05_helicoid_null_trace(acceptance):
    germ = ck_solve(initial_curve_of(get_entry("helicoid").surface(16)), order=16)
    tr = trace_lightlike_curve(germ, step=1e-3, n_steps=100)
    null = float(np.max(tr.null_residual()))
    cross = float(tr.nondegeneracy(1e-3)[tr.index_o])
    B = germ.B_series
    p, n = tr.xy, tr.normals
    side_a = B(*(p + 1e-3 * n).T)
    side_b = B(*(p - 1e-3 * n).T)
    flips = bool(np.all(np.sign(side_a) == -np.sign(side_b)) and np.all(side_a != 0))
    ok = null <= 1e-8 and cross >= 1e-3 and flips
    assert acceptance(5, "non-degenerate point: null curve", ok,
                      f"|<s',s'>| <= {null:.1e}, |s' x s''|(o) = {cross:.3f}, sign flip {flips}")


def test_06_B_expansion_on_axis(acceptance):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(20):
        g = random_curve(rng, 12, True)
        s = ck_solve(g, order=12)
        got = s.B_series.col(0).coeffs[:5]
        worst = max(worst, float(np.max(np.abs(got - expected_B_on_x_axis(profile_of(g))))))
    assert acceptance(6, "B_F(x,0) expansion", worst <= 1e-9, f"max coefficient error {worst:.1e} (1e-9)")


SIGN_CONFIGS = {
    "no_spacelike_part": "[curve]\ninvariants = { u2 = 0.0, v2 = 0.0, v3 = 0.0, v4 = 1.0 }\n",
    "no_timelike_part": "[curve]\ninvariants = { u2 = 0.0, v2 = 0.0, v3 = 0.0, v4 = -1.0 }\n",
    "changes_type": "[curve]\ninvariants = { u2 = 1.0, v2 = -1.0, v3 = 3.0 }\n",
}


def test_07_sign_configurations(acceptance, tmp_path):
    share = {}
    for claim, text in SIGN_CONFIGS.items():
        cfg = tmp_path / f"{claim}.toml"
        cfg.write_text("order = 14\n" + text)
        out = tmp_path / claim
        assert main(["construct", "--config", str(cfg), "--out", str(out)]) == 0
        with open(out / "grid.csv") as fh:
            rows = [(float(r["x"]), float(r["B"])) for r in csv.DictReader(fh)]
        xb = np.array([r for r in rows if r[0] != 0.0 and abs(r[1]) > 1e-12])
        x, B = xb[:, 0], xb[:, 1]
        if claim == "no_spacelike_part":
            good = B < 0
        elif claim == "no_timelike_part":
            good = B > 0
        else:
            # delta = 3 > 0: B ~ -2 delta x^3 / 3 changes sign with x
            good = np.sign(B) == -np.sign(x)
        share[claim] = float(np.mean(good))
    ok = all(v == 1.0 for v in share.values())
    assert acceptance(7, "sign configurations", ok,
                      ", ".join(f"{k} {100 * v:.0f}%" for k, v in share.items()))


def test_08_ak_recursion(acceptance):
    e = get_entry("scherk_spacelike")
    ak = {k: sp.diff(e.expr, X, k).subs(X, 0) * k / sp.factorial(k) for k in range(2, 7)}
    init = {k: (float(ak[k].subs(Y, 0)), float(sp.diff(ak[k], Y).subs(Y, 0))) for k in (4, 5, 6)}
    ys, tab = solve_ak_recursion(ApproxFunction(ak[2]), ApproxFunction(ak[3]), init, 6, y_range=(-0.3, 0.3))
    dev = max(float(np.max(np.abs(tab[k][0] - sp.lambdify(Y, ak[k], "numpy")(ys) * np.ones_like(ys))))
              for k in (4, 5, 6))
    rng = np.random.default_rng(8)
    res = 0.0
    for _ in range(20):
        a = {s: rng.normal(size=3) for s in (2, 3, 4)}
        da = {s: rng.normal(size=3) for s in (2, 3, 4)}
        dda = {s: rng.normal(size=3) for s in (2, 3, 4)}
        res = max(res, float(np.max(np.abs(a22_residual(4, a, da, dda) - a4_printed_residual(a, da, dda)))))
    ok = dev <= 1e-6 and res <= 1e-12
    assert acceptance(8, "a_k recursion", ok, f"Scherk a4..a6 dev {dev:.1e} (1e-6), k=4 specialization {res:.1e}")


def test_09_bjorling_helicoid(acceptance):
    U, V = np.meshgrid(np.linspace(-1, 1, 41), np.linspace(-0.5, 0.5, 41))
    p = bjorling_reconstruct(helicoid_null(), U, V)
    w = np.sqrt(np.abs(V))
    r = np.where(V >= 0, np.cosh(w), np.cos(w))
    err = float(np.max(np.abs(p.points - np.stack([U, np.cos(U) * r, np.sin(U) * r]))))
    assert acceptance(9, "Bjorling helicoid", err <= 1e-9, f"max error {err:.1e} (1e-9)")


def test_10_lightlike_cross_validation(acceptance):
    xs = sp.Symbol("x")
    Xg, Yg = np.meshgrid(np.linspace(-0.1, 0.1, 21), np.linspace(-0.1, 0.1, 21))
    N = 24
    dev, bres = 0.0, 0.0
    for psi in ("0", "sqrt(1 + x**2) - 1", "x**3"):
        e = sp.sympify(psi)
        c = [float(e.diff(xs, n).subs(xs, 0) / math.factorial(n)) for n in range(N + 1)]
        L = ck_solve_lightlike(PowerSeries1(np.array(c), N), order=N)
        R = make_director(SpacelikeCurve.graph_base(e), "+")
        dev = max(dev, float(np.max(np.abs(graph_of_ruled(R, Xg, Yg) - L.series(Xg, Yg)))))
        bres = max(bres, L.B_series.max_abs())
    ok = dev <= 1e-8 and bres <= 1e-10
    assert acceptance(10, "light-like cross-validation", ok, f"graph dev {dev:.1e} (1e-8), max |B_F coeff| {bres:.1e}")


def test_11_curvature_divergence(acceptance):
    xs = np.geomspace(0.1, 1e-3, 20)
    sch = get_entry("scherk_spacelike").surface()
    K1 = np.array([gauss_curvature(sch, (x, 0.0)) for x in xs])
    g = InitialCurve.from_invariants({2: 1.0}, {2: -1.0, 3: -3.0}, order=16)
    germ = ck_solve(g, order=16)
    # B_F comes straight from its series, so a tight light-like band is safe
    pts = [classify_point(germ, (x, 0.0), tol=1e-13) for x in xs]
    K2 = np.array([p.K for p in pts])
    same_sign = all(np.sign(p.K) == np.sign(p.B) for p in pts)
    mono = all(np.all(np.diff(K[-5:]) > 0) and K[-1] > 1e4 for K in (K1, K2))
    ok = mono and same_sign and abs(characteristic(germ)) < 1e-12
    assert acceptance(11, "curvature divergence", ok,
                      f"K(1e-3): Scherk {K1[-1]:.2e}, mu=0 germ {K2[-1]:.2e}; sign(K)=sign(B) {same_sign}")


def test_12_homothety(acceptance):
    rng = np.random.default_rng(12)
    germs = [ck_solve(initial_curve_of(get_entry("scherk_spacelike").surface(12)), order=12),
             ck_solve(random_curve(rng, 12, True), order=12)]
    worst = 0.0
    for s in germs:
        mu = characteristic(s)
        for m in (0.5, 2.0, 3.0):
            worst = max(worst, abs(characteristic(homothety(s, m)) - m * m * mu))
    assert acceptance(12, "homothety", worst <= 1e-10, f"max |mu(m) - m^2 mu| = {worst:.1e} (1e-10)")


def test_13_determinism(acceptance, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(SIGN_CONFIGS["changes_type"])
    outs = []
    for i in range(2):
        d = tmp_path / f"run{i}"
        assert main(["construct", "--config", str(cfg), "--out", str(d)]) == 0
        outs.append({f.name: f.read_bytes() for f in sorted(d.iterdir())})
    same = outs[0] == outs[1]
    assert acceptance(13, "determinism", same, f"{len(outs[0])} files byte-identical: {same}")
