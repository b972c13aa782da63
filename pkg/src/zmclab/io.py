"""Run configuration and deterministic file writers."""

import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ZMCError

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "write_json",
    "write_csv",
    "write_obj",
    "thread_count",
]

DEFAULT_BOX = (-0.3, 0.3, -0.3, 0.3)
DEFAULT_GRID = (101, 101)


class ConfigError(ZMCError):
    """Malformed or invalid run configuration."""


@dataclass
class RunConfig:
    """Validated settings for one CLI run.

    Sections other than the top-level keys (``curve``, ``approx``,
    ``bjorling``, ``ruled``, ``gallery``, ``export``) are kept verbatim in
    ``sections`` and interpreted by the subcommand.
    """

    command: str = ""
    order: int = 12
    box: tuple = DEFAULT_BOX
    grid: tuple = DEFAULT_GRID
    tol: float = 1e-9
    out: Path = Path("zmclab_out")
    json_stdout: bool = False
    sections: dict = field(default_factory=dict)
    source: str = ""

    def validate(self):
        if not isinstance(self.order, int) or self.order < 4:
            raise ConfigError(f"order must be an integer >= 4, got {self.order!r}")
        if len(self.box) != 4 or not (self.box[0] < self.box[1] and self.box[2] < self.box[3]):
            raise ConfigError(f"box must be x0 < x1, y0 < y1, got {self.box!r}")
        if len(self.grid) != 2 or min(self.grid) < 2:
            raise ConfigError(f"grid needs at least 2 samples per axis, got {self.grid!r}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol!r}")
        return self

    def section(self, name):
        return dict(self.sections.get(name, {}))


def _parse_text(text, path):
    suffix = Path(path).suffix.lower()
    if suffix == ".json":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_config(path=None, **overrides):
    """Read a TOML (or ``.json``) config and apply command-line overrides.

    Overrides with value ``None`` are ignored.
    """
    data = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        data = _parse_text(text, path)
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a table")
    sample = data.pop("sample", {})
    cfg = RunConfig(source=str(path or ""))
    try:
        cfg.command = str(data.pop("command", ""))
        cfg.order = data.pop("order", cfg.order)
        cfg.tol = float(data.pop("tol", cfg.tol))
        cfg.box = tuple(float(v) for v in sample.get("box", cfg.box))
        cfg.grid = tuple(int(v) for v in sample.get("grid", cfg.grid))
        if "out" in data:
            cfg.out = Path(data.pop("out"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value in config: {exc}") from exc
    cfg.sections = data
    for key, val in overrides.items():
        if val is not None:
            setattr(cfg, key, val)
    return cfg.validate()


def parse_floats(text, n, what):
    """``"a,b,c"`` -> tuple of ``n`` floats, for command-line flags."""
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from exc
    if len(vals) != n:
        raise ConfigError(f"{what} needs {n} comma-separated numbers")
    return vals


def thread_count():
    """Worker pool size: ``ZMCLAB_THREADS`` or the CPU count."""
    env = os.environ.get("ZMCLAB_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"ZMCLAB_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("ZMCLAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


# -- writers ----------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v)) if np.isfinite(v) else "NaN"
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return str(v)


def write_csv(path, header, columns):
    """Write equal-length ``columns`` under ``header`` with ``repr`` floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = [np.asarray(c).ravel() for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_cell(v) for v in row])
    return path


def write_obj(path, points):
    """Quad mesh of a ``(3, nu, nv)`` sample grid, row-major.

    Vertices are written in ``(t, x, y)`` order; a quad is skipped only if
    one of its corners is NaN, so vertex indices always match the CSV rows.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    P = np.asarray(points, float)
    _, nu, nv = P.shape
    lines = []
    for i in range(nu):
        for j in range(nv):
            t, x, y = (_cell(c) for c in P[:, i, j])
            lines.append(f"v {t} {x} {y}")
    ok = np.isfinite(P).all(axis=0)
    for i in range(nu - 1):
        for j in range(nv - 1):
            if ok[i, j] and ok[i + 1, j] and ok[i + 1, j + 1] and ok[i, j + 1]:
                a = i * nv + j + 1
                lines.append(f"f {a} {a + nv} {a + nv + 1} {a + 1}")
    path.write_text("\n".join(lines) + "\n")
    return path
