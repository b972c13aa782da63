"""Command-line front end.

Exit codes: 0 success, 1 a check or residual failed, 2 configuration
error, 3 solver error.  Human diagnostics go to stderr; stdout is empty
unless ``--json`` is given.
"""

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import sympy as sp

from . import io
from .approx import (
    ApproxFunction,
    approximation_functions,
    predict_causal_type,
    profile_of,
    solve_ak_recursion,
)
from .ck_solver import InitialCurve, ck_solve, ck_solve_lightlike, initial_curve_of
from .curves import (
    NullCurve,
    SpacelikeCurve,
    bjorling_reconstruct,
    graph_of_ruled,
    helicoid_null,
    make_director,
    ruled_metric,
    ruled_surface_eval,
    trace_lightlike_curve,
)
from .errors import ZMCError
from .gallery import gallery_list, get_entry, regression_check
from .geometry import GraphSurface, lightlike_degeneracy, sample_grid, verify_admissible
from .io import ConfigError
from .series import ComplexSeries1, PowerSeries1, PowerSeries2

COMMANDS = ("construct", "classify", "approx", "bjorling", "ruled", "verify", "gallery", "export")


def _say(msg):
    print(msg, file=sys.stderr)


# -- building inputs from config -------------------------------------------

def _phi(sec, order):
    phi = sec.get("phi", 0.0)
    if isinstance(phi, (int, float)):
        return float(phi)
    if isinstance(phi, list):
        try:
            return PowerSeries2.from_terms([(int(j), int(k), float(c)) for j, k, c in phi], order)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"phi terms must be [j, k, c] triples: {exc}") from exc
    raise ConfigError("phi must be a number or a list of [j, k, c] terms")


def _float_list(sec, key):
    try:
        return [float(c) for c in sec[key]]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"curve.{key} must be a list of numbers") from exc


def build_surface(cfg):
    """Germ described by the ``[curve]`` section; returns ``(surface, phi, info)``."""
    sec = cfg.section("curve")
    N = cfg.order
    phi = _phi(sec, N)
    if "gallery" in sec:
        try:
            entry = get_entry(sec["gallery"])
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        if entry.kind == "series":
            surf = entry.builder(N)
            return surf, 0.0, {"gallery": entry.name}
        if entry.kind != "graph":
            raise ConfigError(f"gallery entry {entry.name} is not a graph germ")
        gamma = initial_curve_of(entry.surface(N))
        if entry.lightlike:
            return (ck_solve_lightlike(gamma.u, order=N, name=entry.name), None,
                    {"gallery": entry.name, "lightlike": True})
        return ck_solve(gamma, order=N, name=entry.name), 0.0, {"gallery": entry.name}
    if "psi" in sec:
        psi = _float_list(sec, "psi")
        surf = ck_solve_lightlike(PowerSeries1(np.array(psi), N), order=N)
        return surf, None, {"psi": psi, "lightlike": True}
    if "invariants" in sec:
        inv = sec["invariants"]
        try:
            us = {int(k[1:]): float(v) for k, v in inv.items() if k.startswith("u")}
            vs = {int(k[1:]): float(v) for k, v in inv.items() if k.startswith("v")}
        except (ValueError, AttributeError) as exc:
            raise ConfigError(f"invariants keys must look like u2, v3: {exc}") from exc
        gamma = InitialCurve.from_invariants(us, vs, order=N)
    elif "u" in sec or "v" in sec:
        u = _float_list(sec, "u") if "u" in sec else [0.0]
        v = _float_list(sec, "v") if "v" in sec else [1.0]
        gamma = InitialCurve.from_coeffs(
            np.pad(u, (0, max(0, N + 1 - len(u))))[: N + 1],
            np.pad(v, (0, max(0, N - len(v))))[:N], order=N)
    else:
        raise ConfigError("[curve] needs one of: gallery, psi, invariants, u/v")
    return ck_solve(gamma, phi, order=N), phi, {"initial_curve": gamma.to_dict()}


def _residual(surface, phi):
    scale = max(1.0, surface.series.max_abs())
    if phi is None:
        r = surface.B_series.max_abs()
    else:
        r = verify_admissible(surface, phi).max_abs
    return {"max_abs": r, "scale": scale, "relative": r / scale}


def _range(sec, key, default):
    vals = sec.get(key, default)
    try:
        lo, hi, n = float(vals[0]), float(vals[1]), int(vals[2])
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"{key} must be [lo, hi, n]") from exc
    if n < 2 or not lo < hi:
        raise ConfigError(f"{key} needs lo < hi and n >= 2")
    return np.linspace(lo, hi, n)


# -- commands ---------------------------------------------------------------

def cmd_construct(cfg):
    surf, phi, info = build_surface(cfg)
    res = _residual(surf, phi)
    grid = sample_grid(surf, cfg.box, cfg.grid, cfg.tol, workers=io.thread_count())
    ok = res["relative"] <= cfg.tol
    summary = {
        "command": "construct",
        "order": cfg.order,
        "input": info,
        "phi": phi.to_dict() if isinstance(phi, PowerSeries2) else phi,
        "residual": dict(res, tol=cfg.tol, passed=ok),
        "counts": grid.counts(),
        "series": surf.series.to_dict(),
    }
    cfg.out.mkdir(parents=True, exist_ok=True)
    io.write_json(cfg.out / "surface.json", summary)
    grid.write_csv(cfg.out / "grid.csv")
    _say(f"construct: residual {res['relative']:.3e} (tol {cfg.tol:g}); wrote {cfg.out}")
    return summary, 0 if ok else 1


def _trace_summary(surf, cfg):
    tr = trace_lightlike_curve(surf, step=1e-3, n_steps=100)
    nd = tr.nondegeneracy(1e-3)
    io.write_csv(cfg.out / "trace.csv", ["x", "y", "t", "null_residual"],
                 [tr.xy[:, 0], tr.xy[:, 1], tr.sigma[:, 0], tr.null_residual()])
    return {
        "points": int(len(tr.xy)),
        "max_null_residual": float(tr.null_residual().max()),
        "nondegeneracy_at_o": float(nd[tr.index_o]),
    }


def cmd_classify(cfg):
    surf, _, info = build_surface(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    report = {"command": "classify", "input": info, "degeneracy": lightlike_degeneracy(surf)}
    if report["degeneracy"] == "degenerate":
        prof = profile_of(initial_curve_of(surf))
        report.update(prof.to_dict())
        report["invariants"] = prof.invariants
        report["prediction"] = predict_causal_type(prof)
    else:
        report["nullcurve_trace"] = _trace_summary(surf, cfg)
    io.write_json(cfg.out / "classify.json", report)
    _say(f"classify: {report['degeneracy']}, prediction {report.get('prediction', '-')}")
    return report, 0


def cmd_approx(cfg):
    sec = cfg.section("approx")
    K = int(sec.get("K", 6))
    if K < 4:
        raise ConfigError("approx.K must be >= 4")
    y = _range(sec, "y", [-0.3, 0.3, 601])
    surf, _, info = build_surface(cfg)
    rows = approximation_functions(surf, K)
    entry = get_entry(info["gallery"]) if "gallery" in info else None
    if entry is not None and entry.expr is not None:
        a2, a3 = ApproxFunction(entry.alpha_expr), ApproxFunction(entry.beta_expr)
    else:
        a2, a3 = rows[2], rows[3]
    init = {k: (rows[k].coeff(0), rows[k].coeff(1)) for k in range(4, K + 1)}
    h = float(sec.get("h", 1e-3))
    ys, tables = solve_ak_recursion(a2, a3, init, K, y_range=(float(y[0]), float(y[-1])), h=h)
    cfg.out.mkdir(parents=True, exist_ok=True)
    summary = {"command": "approx", "K": K, "input": info, "y_range": [float(ys[0]), float(ys[-1])],
               "max_deviation_from_series": {}}
    dev = []
    for k in range(2, K + 1):
        a, da, dda = tables[k]
        ser = rows[k](ys)
        io.write_csv(cfg.out / f"a{k}.csv", ["y", "a", "da", "dda", "series"], [ys, a, da, dda, ser])
        d = float(np.max(np.abs(a - ser)))
        summary["max_deviation_from_series"][str(k)] = d
        dev.append(d)
    io.write_csv(cfg.out / "approx_summary.csv", ["k", "max_deviation_from_series"],
                 [np.arange(2, K + 1), dev])
    io.write_json(cfg.out / "approx.json", summary)
    _say(f"approx: wrote a2..a{K} tables to {cfg.out}")
    return summary, 0


def _null_curve(sec, order):
    spec = sec.get("curve", "helicoid_null")
    if spec == "helicoid_null":
        return helicoid_null(int(sec.get("order", 40)))
    if isinstance(spec, dict):
        try:
            comps = [ComplexSeries1(np.array([float(c) for c in spec[a]])) for a in ("t", "x", "y")]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("bjorling.curve needs coefficient lists t, x, y") from exc
        return NullCurve(comps)
    raise ConfigError(f"unknown null curve {spec!r}")


def cmd_bjorling(cfg):
    sec = cfg.section("bjorling")
    sigma = _null_curve(sec, cfg.order)
    null, cross = sigma.check(np.linspace(-1, 1, 201))
    u = _range(sec, "u", [-1.0, 1.0, 41])
    v = _range(sec, "v", [-0.5, 0.5, 41])
    U, V = np.meshgrid(u, v)
    patch = bjorling_reconstruct(sigma, U, V, on_radius=sec.get("on_radius", "mask"), tol=cfg.tol)
    cfg.out.mkdir(parents=True, exist_ok=True)
    io.write_obj(cfg.out / "bjorling.obj", patch.points)
    P = patch.points
    io.write_csv(cfg.out / "bjorling.csv", ["u", "v", "t", "x", "y", "tag", "immersed", "radius_ok"],
                 [U, V, P[0], P[1], P[2], patch.tag, patch.immersed, patch.radius_ok])
    tags, n = np.unique(patch.tag, return_counts=True)
    summary = {
        "command": "bjorling",
        "radius": sigma.radius,
        "null_residual": null,
        "min_nondegeneracy": cross,
        "counts": {str(t): int(c) for t, c in zip(tags, n)},
        "radius_violations": int((~patch.radius_ok).sum()),
        "non_immersed": int((~patch.immersed).sum()),
    }
    io.write_json(cfg.out / "bjorling.json", summary)
    _say(f"bjorling: {P.shape[1]}x{P.shape[2]} samples to {cfg.out}")
    return summary, 0


def _base_curve(sec):
    if "psi" in sec:
        try:
            psi = sp.sympify(sec["psi"])
        except (sp.SympifyError, TypeError) as exc:
            raise ConfigError(f"cannot parse ruled.psi: {exc}") from exc
        return SpacelikeCurve.graph_base(psi), psi
    base = str(sec.get("base", "ellipse a=2"))
    if base.startswith("ellipse"):
        a = 2.0
        if "a=" in base:
            try:
                a = float(base.split("a=")[1])
            except ValueError as exc:
                raise ConfigError(f"bad ellipse spec {base!r}") from exc
        return SpacelikeCurve.ellipse(a), None
    raise ConfigError(f"unknown base curve {base!r}")


def cmd_ruled(cfg):
    sec = cfg.section("ruled")
    base, psi = _base_curve(sec)
    branch = str(sec.get("branch", "+" if psi is not None else "-"))
    R = make_director(base, branch, eps=float(sec.get("eps", 0.5)))
    t = _range(sec, "t", [base.interval[0], base.interval[1], 61])
    n_s = int(sec.get("ns", 11))
    s = np.linspace(-0.9 * R.eps, 0.9 * R.eps, n_s)
    S, T = np.meshgrid(s, t)
    P = ruled_surface_eval(R, T, S)
    E, F, G = ruled_metric(R, T, S)
    det = E * G - F * F
    Ft = base.velocity(T) + S * R.director_derivative(T)
    immersed = np.linalg.norm(np.cross(Ft, R.director(T), axis=0), axis=0) > 1e-10
    cfg.out.mkdir(parents=True, exist_ok=True)
    io.write_obj(cfg.out / "ruled.obj", P)
    io.write_csv(cfg.out / "ruled.csv", ["t_param", "s", "t", "x", "y", "metric_det", "immersed"],
                 [T, S, P[0], P[1], P[2], det, immersed])
    summary = {"command": "ruled", "branch": branch, "eps": R.eps,
               "max_abs_metric_det": float(np.max(np.abs(det)))}
    if psi is not None:
        x0, x1, y0, y1 = cfg.box
        nx, ny = (min(n, 41) for n in cfg.grid)
        X, Y = np.meshgrid(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny))
        f = graph_of_ruled(R, X, Y)
        xs = sp.Symbol("x")
        coeffs = [float(c) for c in sp.Poly(sp.series(psi, xs, 0, cfg.order + 1).removeO(), xs).all_coeffs()[::-1]]
        L = ck_solve_lightlike(PowerSeries1(np.array(coeffs), cfg.order), order=cfg.order)
        summary["graph_vs_lightlike_series"] = float(np.max(np.abs(f - L.series(X, Y))))
    io.write_json(cfg.out / "ruled.json", summary)
    ok = summary["max_abs_metric_det"] <= max(cfg.tol, 1e-10)
    _say(f"ruled: max |det I| = {summary['max_abs_metric_det']:.2e}")
    return summary, 0 if ok else 1


def _check_entry(name):
    return name, regression_check(name).to_dict()


def cmd_verify(cfg):
    sec = cfg.section("gallery")
    names = sec.get("entries") or [e.name for e in gallery_list()]
    with ThreadPoolExecutor(max_workers=io.thread_count()) as pool:
        results = dict(pool.map(_check_entry, names))
    ok = all(r["passed"] for r in results.values())
    report = {"command": "verify", "passed": ok, "entries": results}
    cfg.out.mkdir(parents=True, exist_ok=True)
    io.write_json(cfg.out / "verify.json", report)
    for n in names:
        _say(f"verify {n}: {'pass' if results[n]['passed'] else 'FAIL'}")
    return report, 0 if ok else 1


def cmd_gallery(cfg, name=None):
    cfg.out.mkdir(parents=True, exist_ok=True)
    if name is None:
        listing = {"entries": [e.to_dict() for e in gallery_list()]}
        io.write_json(cfg.out / "gallery.json", listing)
        return listing, 0
    try:
        entry = get_entry(name)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    report = regression_check(entry).to_dict()
    dump = {"entry": entry.to_dict(), "report": report}
    if entry.kind in ("graph", "series"):
        surf = entry.surface(min(cfg.order, 10) if entry.kind == "graph" else cfg.order)
        dump["series"] = surf.series.to_dict()
        sample_grid(surf, cfg.box, cfg.grid, cfg.tol, workers=io.thread_count()).write_csv(
            cfg.out / f"{name}_grid.csv")
    else:
        R = entry.builder()
        t = np.linspace(-math.pi, math.pi, 61)
        S, T = np.meshgrid(np.linspace(-0.9 * R.eps, 0.9 * R.eps, 11), t)
        P = ruled_surface_eval(R, T, S)
        io.write_obj(cfg.out / f"{name}.obj", P)
        E, F, G = ruled_metric(R, T, S)
        io.write_csv(cfg.out / f"{name}.csv", ["t_param", "s", "t", "x", "y", "metric_det"],
                     [T, S, P[0], P[1], P[2], E * G - F * F])
    io.write_json(cfg.out / f"{name}.json", dump)
    return dump, 0 if report["passed"] else 1


def cmd_export(cfg, source=None):
    sec = cfg.section("export")
    src = source or sec.get("input")
    if not src:
        raise ConfigError("export needs an input surface JSON (construct output)")
    try:
        data = json.loads(Path(src).read_text())
        series = PowerSeries2.from_dict(data["series"])
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read surface from {src}: {exc}") from exc
    surf = GraphSurface.from_series(series, normalized=False)
    grid = sample_grid(surf, cfg.box, cfg.grid, cfg.tol, workers=io.thread_count())
    P = np.stack([grid.f, grid.x, grid.y])
    cfg.out.mkdir(parents=True, exist_ok=True)
    io.write_obj(cfg.out / "surface.obj", P)
    immersed = np.isfinite(grid.f)
    io.write_csv(cfg.out / "surface_vertices.csv", ["t", "x", "y", "B", "tag", "immersed"],
                 [grid.f, grid.x, grid.y, grid.B, grid.tag, immersed])
    summary = {"command": "export", "vertices": int(grid.f.size), "counts": grid.counts()}
    io.write_json(cfg.out / "export.json", summary)
    return summary, 0


# -- entry point ------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="zmclab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("target", nargs="?", help="gallery entry name, or input JSON for export")
    p.add_argument("--config", help="TOML (or .json) run configuration")
    p.add_argument("--order", type=int, help="series truncation order N")
    p.add_argument("--box", help="x0,x1,y0,y1")
    p.add_argument("--grid", help="nx,ny")
    p.add_argument("--tol", type=float)
    p.add_argument("--json", action="store_true", help="print the summary JSON on stdout")
    p.add_argument("--out", help="output directory")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        box = io.parse_floats(args.box, 4, "--box") if args.box else None
        grid = tuple(int(v) for v in io.parse_floats(args.grid, 2, "--grid")) if args.grid else None
        cfg = io.load_config(args.config, order=args.order, box=box, grid=grid, tol=args.tol,
                             out=Path(args.out) if args.out else None)
        cmd = args.command
        if cmd == "gallery":
            result, code = cmd_gallery(cfg, args.target)
        elif cmd == "export":
            result, code = cmd_export(cfg, args.target)
        else:
            result, code = globals()[f"cmd_{cmd}"](cfg)
    except ConfigError as exc:
        _say(f"zmclab: config error: {exc}")
        return 2
    except ZMCError as exc:
        _say(f"zmclab: {type(exc).__name__}: {exc}")
        return 3
    if args.json:
        sys.stdout.write(io.dumps(result))
    return code


if __name__ == "__main__":
    sys.exit(main())
