import json

import pytest

from zmclab.cli import main
from zmclab.io import ConfigError, load_config

PLANE = """
order = 8
[sample]
grid = [11, 11]
[curve]
u = [0, 0]
v = [1]
"""

CASE_I = """
order = 12
[sample]
grid = [21, 21]
[curve]
invariants = { v4 = 1.0 }
"""


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_construct_plane(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["construct", "--config", write(tmp_path, PLANE), "--out", str(out)]) == 0
    data = json.loads((out / "surface.json").read_text())
    assert data["residual"]["max_abs"] == 0.0
    assert data["series"]["coeffs"] == [[0, 1, 1.0]]
    assert (out / "grid.csv").read_text().count("\n") == 122
    assert capsys.readouterr().out == ""


def test_construct_case_i_has_no_spacelike_samples(tmp_path):
    out = tmp_path / "o"
    assert main(["construct", "--config", write(tmp_path, CASE_I), "--out", str(out)]) == 0
    counts = json.loads((out / "surface.json").read_text())["counts"]
    assert "spacelike" not in counts and counts["timelike"] > 0


def test_json_flag_prints_summary(tmp_path, capsys):
    main(["classify", "--config", write(tmp_path, '[curve]\ngallery = "ojm"\n'),
          "--out", str(tmp_path / "o"), "--json"])
    rep = json.loads(capsys.readouterr().out)
    assert (rep["mu"], rep["delta"], rep["prediction"], rep["family"]) == (0.0, 9.0, "changes_type", "zeroI")


def test_classify_lightcone(tmp_path, capsys):
    main(["classify", "--config", write(tmp_path, '[curve]\ngallery = "lightcone"\n'),
          "--out", str(tmp_path / "o"), "--json"])
    rep = json.loads(capsys.readouterr().out)
    assert rep["mu"] == 0.0 and rep["family"] == "zeroII"


def test_classify_nondegenerate_attaches_trace(tmp_path, capsys):
    cfg = write(tmp_path, "order = 12\n[curve]\nu = [0, 0, 0.2]\nv = [1, 0.5]\n")
    main(["classify", "--config", cfg, "--out", str(tmp_path / "o"), "--json"])
    rep = json.loads(capsys.readouterr().out)
    assert rep["degeneracy"] == "nondegenerate"
    assert rep["nullcurve_trace"]["max_null_residual"] < 1e-8
    assert (tmp_path / "o" / "trace.csv").exists()


def test_malformed_toml_exit_2(tmp_path):
    assert main(["construct", "--config", write(tmp_path, "order = [")]) == 2


@pytest.mark.parametrize("text", ["order = 2\n", "[sample]\ngrid = [1, 5]\n", "tol = -1\n",
                                  "[curve]\nfoo = 1\n", '[curve]\ngallery = "nope"\n'])
def test_invalid_config_exit_2(tmp_path, text):
    assert main(["construct", "--config", write(tmp_path, text), "--out", str(tmp_path / "o")]) == 2


def test_solver_error_exit_3(tmp_path):
    # u'(0) != 0 breaks the normalization required by the solver
    cfg = write(tmp_path, "[curve]\nu = [0, 0.5]\nv = [1]\n")
    assert main(["construct", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


def test_flags_override_config(tmp_path):
    cfg = load_config(write(tmp_path, PLANE), order=10, box=(-0.1, 0.1, -0.2, 0.2))
    assert cfg.order == 10 and cfg.box == (-0.1, 0.1, -0.2, 0.2) and cfg.grid == (11, 11)
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "{bad json", "x.json"))


def test_json_config_alternative(tmp_path):
    cfg = load_config(write(tmp_path, json.dumps({"order": 6, "curve": {"v": [1]}}), "c.json"))
    assert cfg.order == 6 and cfg.section("curve") == {"v": [1]}


def test_determinism_and_thread_invariance(tmp_path, monkeypatch):
    cfg = write(tmp_path, CASE_I)
    outs = []
    for i, threads in enumerate(("1", "1", "4")):
        monkeypatch.setenv("ZMCLAB_THREADS", threads)
        d = tmp_path / f"o{i}"
        main(["construct", "--config", cfg, "--out", str(d)])
        outs.append([(d / f).read_bytes() for f in ("surface.json", "grid.csv")])
    assert outs[0] == outs[1] == outs[2]


def test_bjorling_outputs(tmp_path):
    cfg = write(tmp_path, "[bjorling]\nu = [-1, 1, 5]\nv = [-0.5, 0.5, 5]\n")
    assert main(["bjorling", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    obj = (tmp_path / "o" / "bjorling.obj").read_text().splitlines()
    assert sum(l.startswith("v ") for l in obj) == 25
    assert sum(l.startswith("f ") for l in obj) == 16
    rows = (tmp_path / "o" / "bjorling.csv").read_text().splitlines()
    assert rows[0] == "u,v,t,x,y,tag,immersed,radius_ok"
    # the v = 0 row is the null curve itself: light-like and flagged non-immersed
    mid = [r for r in rows[1:] if r.split(",")[1] == "0.0"]
    assert all(r.split(",")[5] == "lightlike" and r.split(",")[6] == "0" for r in mid)


def test_ruled_with_graph_base(tmp_path):
    cfg = write(tmp_path, '[ruled]\npsi = "sqrt(1 + x**2) - 1"\n[sample]\nbox = [-0.2, 0.2, -0.2, 0.2]\n')
    main(["ruled", "--config", cfg, "--out", str(tmp_path / "o"), "--order", "24"])
    rep = json.loads((tmp_path / "o" / "ruled.json").read_text())
    assert rep["max_abs_metric_det"] < 1e-10
    assert rep["graph_vs_lightlike_series"] < 1e-9


def test_approx_six_tables(tmp_path):
    cfg = write(tmp_path, '[curve]\ngallery = "scherk_spacelike"\n[approx]\nK = 6\n')
    assert main(["approx", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    assert len(list((tmp_path / "o").glob("*.csv"))) == 6


def test_verify_gallery_all_pass(tmp_path):
    assert main(["verify", "--out", str(tmp_path / "o")]) == 0
    assert json.loads((tmp_path / "o" / "verify.json").read_text())["passed"] is True


def test_gallery_listing_and_entry(tmp_path):
    assert main(["gallery", "--out", str(tmp_path)]) == 0
    names = [e["name"] for e in json.loads((tmp_path / "gallery.json").read_text())["entries"]]
    assert "ellipse" in names
    assert main(["gallery", "ellipse", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "ellipse.obj").exists()


def test_export_from_construct(tmp_path):
    main(["construct", "--config", write(tmp_path, CASE_I), "--out", str(tmp_path / "a")])
    assert main(["export", str(tmp_path / "a" / "surface.json"), "--grid", "5,4",
                 "--out", str(tmp_path / "b")]) == 0
    obj = (tmp_path / "b" / "surface.obj").read_text().splitlines()
    assert sum(l.startswith("f ") for l in obj) == 12
    header = (tmp_path / "b" / "surface_vertices.csv").read_text().splitlines()[0]
    assert header.endswith(",immersed")
    assert main(["export", str(tmp_path / "missing.json")]) == 2
