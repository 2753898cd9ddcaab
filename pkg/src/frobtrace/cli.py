"""Command-line front end.

Usage::

    frobtrace group-verify --ell 5 --g 2 --lemma L5.4 --z 2 --out l54.json
    frobtrace trace --curves pair.txt --p 101
    frobtrace survey --curves pair.txt --x 100000 --t 0 --out survey.json
    frobtrace survey --curves pair.txt --x 10000 --ell-range auto --table per_ell --out ells.csv
    frobtrace bounds --x-grid 1000,100000,12 --g 2 --t0 --out bounds.csv
    frobtrace report --inputs survey.json,bounds.csv --out compare.csv

Every subcommand also reads ``--config FILE``: flat ``key = value`` lines
with the flag names spelled with underscores.  Flags given on the command
line override the file.  Outputs start with a run manifest: a ``manifest``
key in JSON, ``# key: value`` comment lines in CSV.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import __version__
from . import bounds as bnd
from . import survey as sv
from .curves import load_catalog, trace_detail
from .errors import (
    FrobtraceError,
    MalformedInputError,
    SchemaError,
)
from .group_lab.groups import DEFAULT_CAP
from .group_lab.verify import LEMMAS, verify_lemma
from .modarith import is_prime

# ---------------------------------------------------------------------------
# value parsers; each takes the raw string and returns the canonical value


def _int(s: str) -> int:
    try:
        return int(str(s).strip())
    except ValueError:
        raise MalformedInputError(f"expected an integer, got {s!r}") from None


def _float(s: str) -> float:
    try:
        v = float(str(s).strip())
    except ValueError:
        raise MalformedInputError(f"expected a number, got {s!r}") from None
    if not math.isfinite(v):
        raise MalformedInputError(f"expected a finite number, got {s!r}")
    return v


def _bool(s: str) -> bool:
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise MalformedInputError(f"expected a boolean, got {s!r}")


def _odd_prime(s: str) -> int:
    v = _int(s)
    if v < 3 or not is_prime(v):
        raise MalformedInputError("ell must be an odd prime")
    return v


def _prime(s: str) -> int:
    v = _int(s)
    if not is_prime(v):
        raise MalformedInputError(f"p must be prime (got {v})")
    return v


def _positive_int(s: str) -> int:
    v = _int(s)
    if v < 1:
        raise MalformedInputError(f"expected a positive integer, got {v}")
    return v


def _positive(s: str) -> float:
    v = _float(s)
    if not v > 0:
        raise MalformedInputError(f"expected a positive number, got {v}")
    return v


def _x(s: str) -> int:
    v = _int(s)
    if v < 3:
        raise MalformedInputError("x must be >= 3")
    return v


def _grid(s: str) -> tuple[float, float, int]:
    parts = str(s).split(",")
    if len(parts) != 3:
        raise MalformedInputError(f"x-grid must be 'a,b,steps', got {s!r}")
    a, b, steps = _float(parts[0]), _float(parts[1]), _int(parts[2])
    if steps < 1 or b < a or a < 3:
        raise MalformedInputError("x-grid needs 3 <= a <= b and steps >= 1")
    return (a, b, steps)


def _ell_range(s: str) -> tuple[float, float] | str:
    if str(s).strip() in ("auto", "schedule"):
        return str(s).strip()
    parts = str(s).split(",")
    if len(parts) != 2:
        raise MalformedInputError(f"ell-range must be 'y,u', 'auto' or 'schedule', got {s!r}")
    y, u = _float(parts[0]), _float(parts[1])
    if y < 0 or u < 0:
        raise MalformedInputError("ell-range needs y, u >= 0")
    return (y, u)


def _choice(*options: str) -> Callable[[str], str]:
    def parse(s: str) -> str:
        v = str(s).strip()
        if v not in options:
            raise MalformedInputError(f"expected one of {', '.join(options)}, got {v!r}")
        return v

    return parse


def _str(s: str) -> str:
    v = str(s).strip()
    if not v:
        raise MalformedInputError("expected a non-empty value")
    return v


def _paths(s: str) -> tuple[str, ...]:
    items = tuple(p.strip() for p in str(s).split(",") if p.strip())
    if not items:
        raise MalformedInputError("report needs at least one input file")
    return items


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    return str(v)


# ---------------------------------------------------------------------------
# subcommand schemas: key -> (parser, default, help)

_Opt = tuple[Callable[[str], Any], Any, str]

SCHEMAS: dict[str, dict[str, _Opt]] = {
    "group-verify": {
        "ell": (_odd_prime, None, "odd prime modulus"),
        "g": (_positive_int, None, "number of GL2 components"),
        "lemma": (_choice(*LEMMAS), None, "lemma id: " + ", ".join(LEMMAS)),
        "t": (_int, None, "trace residue (default: every residue)"),
        "z": (_positive, None, "range bound for the |t| <= z sets"),
        "xi": (_int, None, "non-square for the non-split Cartan"),
        "cap": (_positive_int, DEFAULT_CAP, "enumeration size guard"),
        "out": (_str, None, "output JSON path (default stdout)"),
    },
    "trace": {
        "curves": (_str, None, "curve catalog file"),
        "p": (_prime, None, "prime"),
        "method": (_choice("auto", "exhaustive", "bsgs"), "auto", "point-count method"),
        "seed": (_int, 0, "seed for BSGS random points"),
        "out": (_str, None, "output CSV path (default stdout)"),
    },
    "survey": {
        "curves": (_str, None, "curve catalog file"),
        "x": (_x, None, "survey bound"),
        "x_grid": (_grid, None, "a,b,steps: series of pi_t at rounded grid points up to b"),
        "t": (_int, None, "target value of a_1,p (default 0)"),
        "z": (_positive, None, "count |a_1,p| <= z instead of a single t"),
        "ell": (_odd_prime, None, "prime ell for the splitting counts"),
        "ell_range": (_ell_range, None, "y,u window for the max over ell; 'schedule' derives it from x, 'auto' also clamps it to feasibility"),
        "eps": (_positive, 0.1, "epsilon for large-trace and the auto schedule"),
        "threads": (_positive_int, 1, "worker processes"),
        "seed": (_int, 0, "seed for BSGS random points"),
        "cache": (_str, None, "binary trace cache file"),
        "table": (_choice("histogram", "per_ell", "series"), "histogram", "table written for CSV output"),
        "out": (_str, None, "output path, .csv or .json (default JSON on stdout)"),
    },
    "bounds": {
        "x_grid": (_grid, None, "a,b,steps linear grid"),
        "g": (_positive_int, None, "number of curves"),
        "t0": (_bool, False, "use the t = 0 exponents"),
        "constant": (_positive, 1.0, "multiplier for the bounds"),
        "eps": (_positive, 0.1, "epsilon in the u schedule"),
        "out": (_str, None, "output CSV path (default stdout)"),
    },
    "report": {
        "inputs": (_paths, None, "comma-separated survey JSON/CSV and optional bounds CSV"),
        "constant": (_positive, 1.0, "multiplier when bounds are computed here"),
        "out": (_str, None, "output CSV path (default stdout)"),
    },
}

REQUIRED = {
    "group-verify": ("ell", "g", "lemma"),
    "trace": ("curves", "p"),
    "survey": ("curves",),
    "bounds": ("x_grid", "g"),
    "report": ("inputs",),
}

# execution details that never change the output bytes
_NOT_ECHOED = {"threads", "out"}


@dataclass
class Command:
    name: str
    params: dict[str, Any]
    # provenance of each explicitly set key; not part of equality
    file_values: dict[str, str] = field(default_factory=dict, compare=False)
    flag_values: dict[str, str] = field(default_factory=dict, compare=False)


def serialize(cmd: Command) -> str:
    """Config-file text that parses back to ``cmd``."""
    lines = [f"command = {cmd.name}"]
    for key in SCHEMAS[cmd.name]:
        v = cmd.params.get(key)
        if v is not None:
            lines.append(f"{key} = {_fmt(v)}")
    return "\n".join(lines) + "\n"


def read_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise MalformedInputError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key in out:
            raise MalformedInputError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def build_command(name: str, file_values: dict[str, str], flag_values: dict[str, str]) -> Command:
    if name not in SCHEMAS:
        raise MalformedInputError(f"unknown subcommand {name!r}")
    schema = SCHEMAS[name]
    file_values = dict(file_values)
    declared = file_values.pop("command", name)
    if declared != name:
        raise MalformedInputError(f"config is for {declared!r}, not {name!r}")
    for key in list(file_values) + list(flag_values):
        if key not in schema:
            raise MalformedInputError(f"unknown key {key!r} for {name}")
    params: dict[str, Any] = {}
    for key, (parse, default, _) in schema.items():
        raw = flag_values.get(key, file_values.get(key))
        if raw is None:
            params[key] = default
            continue
        try:
            params[key] = parse(raw)
        except MalformedInputError as e:
            raise MalformedInputError(f"{key}: {e}") from None
    for key in REQUIRED[name]:
        if params[key] is None:
            raise MalformedInputError(f"missing required key {key!r}")
    _cross_checks(name, params)
    return Command(name, params, dict(file_values), dict(flag_values))


def _cross_checks(name: str, p: dict[str, Any]) -> None:
    if name == "survey":
        if (p["x"] is None) == (p["x_grid"] is None):
            raise MalformedInputError("survey needs exactly one of x, x_grid")
        if p["t"] is not None and p["z"] is not None:
            raise MalformedInputError("t and z are mutually exclusive")
        if p["ell"] is not None and p["ell_range"] is not None:
            raise MalformedInputError("ell and ell_range are mutually exclusive")
        if p["table"] == "per_ell" and p["ell_range"] is None:
            raise MalformedInputError("table per_ell needs ell_range")


def parse_text(text: str) -> Command:
    """Parse a self-contained config (with a ``command`` key)."""
    values = read_config_text(text)
    if "command" not in values:
        raise MalformedInputError("config text needs a 'command' key")
    return build_command(values["command"], values, {})


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frobtrace", description="Frobenius-trace surveys and matrix-group checks.")
    ap.add_argument("--version", action="version", version=f"frobtrace {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, schema in SCHEMAS.items():
        sp = sub.add_parser(name, argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="key = value file; flags override it")
        for key, (_, default, help_) in schema.items():
            flag = "--" + key.replace("_", "-")
            if key == "t0":
                sp.add_argument(flag, action="store_const", const="true", help=help_)
            else:
                suffix = f" (default {_fmt(default)})" if default is not None else ""
                sp.add_argument(flag, dest=key, help=help_ + suffix)
    return ap


def parse_config(argv: list[str]) -> Command:
    """Command line (plus optional --config file) to a validated Command."""
    ns = vars(_parser().parse_args(argv))
    name = ns.pop("command")
    cfg_path = ns.pop("config", None)
    file_values = {}
    if cfg_path is not None:
        try:
            file_values = read_config_text(Path(cfg_path).read_text())
        except OSError as e:
            raise MalformedInputError(f"cannot read config {cfg_path}: {e.strerror}") from None
    return build_command(name, file_values, {k: str(v) for k, v in ns.items()})


# ---------------------------------------------------------------------------
# manifest and writers


def _wall_clock() -> str:
    # SOURCE_DATE_EPOCH pins the timestamp for byte-reproducible outputs
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else time.time()
    return dt.datetime.fromtimestamp(t, dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_manifest(cmd: Command, catalog: str | None = None, disclosure: str | None = None,
                 **extra: Any) -> dict[str, Any]:
    echo = {k: (list(v) if isinstance(v, tuple) else v)
            for k, v in cmd.params.items() if v is not None and k not in _NOT_ECHOED}
    man = {
        "tool": "frobtrace",
        "version": __version__,
        "command": cmd.name,
        "config": echo,
        "from_file": sorted(k for k in cmd.file_values if k not in _NOT_ECHOED),
        "from_flags": sorted(k for k in cmd.flag_values if k not in _NOT_ECHOED),
        "wall_clock": _wall_clock(),
        "seed": cmd.params.get("seed", 0),
    }
    if catalog is not None:
        man["catalog_sha256"] = _sha256(catalog)
    if disclosure is not None:
        man["disclosure"] = disclosure
    man.update(extra)
    return man


def sanitize(obj: Any) -> Any:
    """Replace non-finite floats by None so the JSON stays standard."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    return obj


def dump_json(manifest: dict, payload: dict) -> str:
    doc = {"manifest": manifest}
    doc.update(payload)
    return json.dumps(sanitize(doc), indent=2, allow_nan=False) + "\n"


def _cell(v: Any) -> str:
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    return str(v)


def dump_csv(manifest: dict, header: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    for k, v in manifest.items():
        buf.write(f"# {k}: {json.dumps(sanitize(v), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(r[h]) for h in header])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, newline="\n")


def read_csv(path: str) -> tuple[dict[str, Any], list[dict[str, str]]]:
    """Manifest comment lines and data rows of a file written by ``dump_csv``."""
    manifest: dict[str, Any] = {}
    body = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            try:
                manifest[key] = json.loads(value)
            except json.JSONDecodeError:
                raise SchemaError(f"{path}: bad manifest line {line!r}") from None
        elif line.strip():
            body.append(line)
    if not body:
        raise SchemaError(f"{path}: missing CSV header row")
    return manifest, list(csv.DictReader(body))


# ---------------------------------------------------------------------------
# subcommands


def _grid_points(grid: tuple[float, float, int]) -> list[float]:
    return [float(v) for v in bnd.x_grid(*grid)]


def cmd_group_verify(cmd: Command) -> int:
    p = cmd.params
    rep = verify_lemma(p["lemma"], p["ell"], p["g"], t=p["t"], z=p["z"], cap=p["cap"], xi=p["xi"])
    _emit(dump_json(run_manifest(cmd), rep.to_dict()), p["out"])
    return 0 if rep.passed else 1


def cmd_trace(cmd: Command) -> int:
    p = cmd.params
    curves = load_catalog(p["curves"])
    rows = []
    for c in curves:
        res = trace_detail(c, p["p"], p["method"], p["seed"])
        rows.append({"label": c.label, "p": p["p"], "a_p": res.a_p, "method": res.method})
    _emit(dump_csv(run_manifest(cmd, p["curves"]), ["label", "p", "a_p", "method"], rows), p["out"])
    return 0


def survey_report(cmd: Command) -> tuple[dict, sv.SurveyReport]:
    p = cmd.params
    curves = load_catalog(p["curves"])
    if not curves:
        raise MalformedInputError(f"catalog {p['curves']} has no curves")
    t = 0 if p["t"] is None else p["t"]
    if p["x_grid"] is not None:
        xs = sorted({int(round(v)) for v in _grid_points(p["x_grid"])})
        x = xs[-1]
    else:
        x, xs = p["x"], None
    cfg = sv.SurveyConfig(curves, x, t=t, z=p["z"], ell=p["ell"], epsilon=p["eps"],
                          threads=p["threads"], seed=p["seed"], cache_path=p["cache"])
    ell_range = p["ell_range"]
    if ell_range in ("auto", "schedule"):
        sched = bnd.choose_parameters(x, len(curves), t == 0 and p["z"] is None, p["eps"],
                                      clamp=ell_range == "auto")
        ell_range = (sched.y, sched.u)
    rep = sv.run_survey(cfg, ell_range=ell_range, x_grid=xs)
    rep.warnings = sv.sanity_checks(curves)
    return run_manifest(cmd, p["curves"], sv.BAD_PRIME_DISCLOSURE, g=len(curves)), rep


def cmd_survey(cmd: Command) -> int:
    p = cmd.params
    manifest, rep = survey_report(cmd)
    out = p["out"]
    if out is not None and out.endswith(".csv"):
        d = rep.to_dict()
        if p["table"] == "histogram":
            text = dump_csv(manifest, ["t", "count"], d["histogram"])
        elif p["table"] == "per_ell":
            text = dump_csv(manifest, ["ell", "pi_ell_t"], d["per_ell"])
        else:
            header = ["x", "pi_t"] + (["pi_range_z"] if p["z"] is not None else [])
            text = dump_csv(manifest, header, d["series"])
    else:
        text = dump_json(manifest, rep.to_dict())
    _emit(text, out)
    return 0


BOUNDS_HEADER = ["x", "bound", "torus_bound", "y", "u"]


def cmd_bounds(cmd: Command) -> int:
    p = cmd.params
    rows = bnd.bounds_table(_grid_points(p["x_grid"]), p["g"], p["t0"], p["constant"], p["eps"])
    _emit(dump_csv(run_manifest(cmd), BOUNDS_HEADER, rows), p["out"])
    return 0


REPORT_HEADER = ["x", "pi_t", "theorem1_bound", "torus_bound"]


@dataclass
class _Series:
    path: str
    kind: str  # "survey" or "bounds"
    manifest: dict
    rows: dict[float, dict[str, float]]


def _require(cols, need, path):
    missing = [c for c in need if c not in cols]
    if missing:
        raise SchemaError(f"{path}: missing columns {', '.join(missing)}")


def _load_series(path: str) -> _Series:
    if not Path(path).is_file():
        raise MalformedInputError(f"no such input file {path}")
    if path.endswith(".json"):
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise SchemaError(f"{path}: invalid JSON ({e.msg})") from None
        if not isinstance(doc, dict) or "series" not in doc or "manifest" not in doc:
            raise SchemaError(f"{path}: not a survey JSON (needs manifest and series)")
        raw = [{k: str(v) for k, v in r.items()} for r in doc["series"]]
        manifest = doc["manifest"]
    else:
        manifest, raw = read_csv(path)
    if not raw:
        raise SchemaError(f"{path}: no data rows")
    cols = raw[0].keys()
    if "pi_t" in cols:
        kind, need = "survey", ["x", "pi_t"]
    else:
        kind, need = "bounds", ["x", "bound", "torus_bound"]
    _require(cols, need, path)
    rows: dict[float, dict[str, float]] = {}
    prev = -math.inf
    for r in raw:
        try:
            vals = {c: float(r[c]) for c in need}
        except (TypeError, ValueError):
            raise SchemaError(f"{path}: non-numeric value in row {r}") from None
        if not vals["x"] > prev:
            raise SchemaError(f"{path}: x grid is not strictly increasing at x={r['x']}")
        prev = vals["x"]
        rows[vals["x"]] = vals
    return _Series(path, kind, manifest, rows)


def combine(inputs: list[str], constant: float = 1.0) -> list[dict]:
    """Empirical counts and both bounds on the coarsest shared grid, no extrapolation."""
    if not inputs:
        raise MalformedInputError("report needs at least one input file")
    series = [_load_series(p) for p in inputs]
    surveys = [s for s in series if s.kind == "survey"]
    bounds_in = [s for s in series if s.kind == "bounds"]
    if len(surveys) != 1 or len(bounds_in) > 1:
        raise SchemaError("report takes exactly one survey series and at most one bounds table")
    srv = surveys[0]
    cfg = srv.manifest.get("config", {})
    g = srv.manifest.get("g")
    if not isinstance(g, int) or g < 1:
        raise SchemaError(f"{srv.path}: manifest does not record g")
    t_is_zero = cfg.get("t", 0) in (0, None) and cfg.get("z") is None
    x_max = max(srv.rows)
    if bounds_in:
        bd = bounds_in[0]
        bcfg = bd.manifest.get("config", {})
        if "g" in bcfg and bcfg["g"] != g:
            raise SchemaError(f"{bd.path}: bounds computed for g={bcfg['g']}, survey has g={g}")
        # the coarser grid (fewer points within the surveyed range) drives the rows
        within = sorted(x for x in bd.rows if x <= x_max)
        grid = within if len(within) < len(srv.rows) else sorted(srv.rows)
        finer = srv.rows if grid is within else {x: v for x, v in bd.rows.items() if x <= x_max}
        missing = [x for x in grid if x not in finer]
        if missing:
            raise SchemaError(f"grids do not nest: x={missing[0]:g} is absent from the finer grid")
        if not grid:
            raise SchemaError("no bounds grid point lies inside the surveyed range")
        return [{
            "x": _num(x),
            "pi_t": int(srv.rows[x]["pi_t"]),
            "theorem1_bound": bd.rows[x]["bound"],
            "torus_bound": bd.rows[x]["torus_bound"],
        } for x in grid]
    return [{
        "x": _num(x),
        "pi_t": int(r["pi_t"]),
        "theorem1_bound": bnd.theorem1_bound(x, g, t_is_zero, constant),
        "torus_bound": bnd.torus_variant_bound(x, g, constant),
    } for x, r in sorted(srv.rows.items())]


def _num(x: float) -> int | float:
    return int(x) if float(x).is_integer() else x


def cmd_report(cmd: Command) -> int:
    p = cmd.params
    rows = combine(list(p["inputs"]), p["constant"])
    _emit(dump_csv(run_manifest(cmd), REPORT_HEADER, rows), p["out"])
    return 0


HANDLERS = {
    "group-verify": cmd_group_verify,
    "trace": cmd_trace,
    "survey": cmd_survey,
    "bounds": cmd_bounds,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse_config(argv)
        return HANDLERS[cmd.name](cmd)
    except FrobtraceError as e:
        print(f"frobtrace: error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"frobtrace: error: {e.strerror}: {e.filename}", file=sys.stderr)
        return MalformedInputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
