"""
Command-line front end.

    iso-euler noh|bubble|similarity|verify --config run.json [--out DIR] [--format csv|json]

Exit codes: 0 success, 1 numerical failure, 2 configuration error.
The environment variable ISO_EULER_THREADS caps the worker count of the Noh
sweep (default 1); results are ordered identically for any worker count.
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fvcheck
from .eos import PolytropicCaseIEos, eos_from_dict
from .errors import ConfigError, IsoEulerError
from .rh import NOH_COLUMNS, noh_row, solve_noh_shock
from .scaling import classify, derive_exponents
from .similarity import (
    CaseITransformedState,
    SimilarityState,
    SimilarityTrajectory,
    integrate_case1,
    integrate_reduced,
)
from .solutions import bubble_fields, bubble_solution, noh_solution

log = logging.getLogger("iso_euler")

FLOAT_FMT = ".17g"
SUBCOMMANDS = ("noh", "bubble", "similarity", "verify")

WATER = {"type": "tait", "B": 3.214e-3, "gamma": 7.0, "rho_ref": 1.0}

_SCHEMA = {
    "noh": {
        "required": {"eos", "u0_min", "u0_max", "num_points"},
        "optional": {"rho0": 1.0, "spacing": "linear", "sie_zero_at_rho0": True},
    },
    "bubble": {
        "required": set(),
        "optional": {"B": -1e-3, "rho_ref": 1.0, "n": [0, 1, 2], "num_points": 200,
                     "I0": 0.0, "t": 1.0},
    },
    "similarity": {
        "required": {"case", "a", "initial"},
        "optional": {"xi_end": None, "J_end": None, "eos": None, "A1": None, "n": 0,
                     "r": None, "tol": 1e-10, "atol": 1e-12},
    },
    "verify": {
        "required": set(),
        "optional": {"eos": WATER, "rho0": 1.0, "u0": 0.1, "resolutions": [100, 200, 400],
                     "t_final": 1.0, "shock_tolerance_cells": 2.0, "shock_speed_N": 800,
                     "shock_speed_tolerance": 0.05, "bubble": {}},
    },
}
_BUBBLE_VERIFY = {"n": [0, 1, 2], "B": -1e-3, "rho_ref": 1.0,
                  "resolutions": [100, 200, 400], "t0": 1.0, "t_final": 1.2,
                  "min_order": 0.8}


@dataclass
class RunConfig:
    subcommand: str
    params: dict
    out: Path = Path(".")
    fmt: str = "csv"
    eos: object = None
    extra: dict = field(default_factory=dict)


def _number(params, key, positive=False):
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{key}: expected a finite number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"{key}: must be positive")
    return float(v)


def _int(params, key, minimum=1):
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"{key}: expected an integer >= {minimum}, got {v!r}")
    return v


def _eos(data, key="eos"):
    if not isinstance(data, dict):
        raise ConfigError(f"{key}: expected an EOS object")
    try:
        return eos_from_dict(data)
    except KeyError as exc:
        raise ConfigError(f"{key}.{exc.args[0]}") from None
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def load_config(subcommand, raw, out=".", fmt="csv"):
    """Validate a parsed JSON config and fill defaults; unknown keys are rejected."""
    if subcommand not in _SCHEMA:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    schema = _SCHEMA[subcommand]
    allowed = schema["required"] | set(schema["optional"])
    for key in raw:
        if key not in allowed:
            raise ConfigError(f"{key}: unknown key for '{subcommand}'")
    for key in sorted(schema["required"]):
        if key not in raw:
            raise ConfigError(f"{key}: required key missing for '{subcommand}'")
    params = {k: v for k, v in schema["optional"].items()}
    params.update(raw)
    cfg = RunConfig(subcommand, params, Path(out), fmt)
    getattr(sys.modules[__name__], f"_validate_{subcommand}")(cfg)
    return cfg


def _validate_noh(cfg):
    p = cfg.params
    cfg.eos = _eos(p["eos"])
    lo, hi = _number(p, "u0_min", True), _number(p, "u0_max", True)
    if hi < lo:
        raise ConfigError("u0_max: must be >= u0_min")
    _int(p, "num_points")
    _number(p, "rho0", True)
    if p["spacing"] not in ("linear", "log"):
        raise ConfigError("spacing: expected 'linear' or 'log'")
    if not isinstance(p["sie_zero_at_rho0"], bool):
        raise ConfigError("sie_zero_at_rho0: expected true/false")


def _validate_bubble(cfg):
    p = cfg.params
    if not _number(p, "B") < 0:
        raise ConfigError("B: the bubble requires B < 0")
    _number(p, "rho_ref", True)
    _number(p, "I0")
    _number(p, "t", True)
    _int(p, "num_points", 2)
    ns = p["n"]
    if not isinstance(ns, list) or not ns or any(v not in (0, 1, 2) or isinstance(v, bool)
                                                 for v in ns):
        raise ConfigError("n: expected a non-empty list drawn from 0, 1, 2")


def _validate_similarity(cfg):
    p = cfg.params
    if p["case"] not in ("I", "II", "III", "IV"):
        raise ConfigError("case: expected one of I, II, III, IV")
    a = p["a"]
    if not (isinstance(a, list) and len(a) == 3
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in a)):
        raise ConfigError("a: expected [a1, a2, a3]")
    if a[0] == 0:
        raise ConfigError("a: a1 must be nonzero")
    actual = classify(*a).value
    if actual != p["case"]:
        raise ConfigError(f"case: constants {a} belong to case {actual}, not {p['case']}")
    end_key, other = ("J_end", "xi_end") if p["case"] == "I" else ("xi_end", "J_end")
    if p[other] is not None:
        raise ConfigError(f"{other}: not used for case {p['case']} (use {end_key})")
    if p[end_key] is None:
        raise ConfigError(f"{end_key}: required key missing for case {p['case']}")
    _number(p, end_key, positive=(end_key == "xi_end"))
    _number(p, "tol", True)
    _number(p, "atol", True)
    _int(p, "n", 0)
    if p["n"] > 2:
        raise ConfigError("n: geometry must be 0, 1 or 2")
    init = p["initial"]
    if not isinstance(init, dict):
        raise ConfigError("initial: expected an object")
    want = {"xi", "J", "W"} if p["case"] == "I" else {"xi", "w", "j"}
    for key in init:
        if key not in want:
            raise ConfigError(f"initial.{key}: unknown key for case {p['case']}")
    for key in sorted(want):
        if key not in init:
            raise ConfigError(f"initial.{key}: required key missing")
        _number(init, key)
    if p["case"] == "I":
        if p["A1"] is None:
            raise ConfigError("A1: required for case I")
        _number(p, "A1", True)
        if p["eos"] is not None:
            raise ConfigError("eos: case I fixes the power-law EOS through A1")
    else:
        if p["A1"] is not None:
            raise ConfigError("A1: only used for case I")
        if p["eos"] is None:
            raise ConfigError("eos: required for cases II-IV")
        cfg.eos = _eos(p["eos"])
        if p["r"] is not None:
            _number(p, "r", True)


def _validate_verify(cfg):
    p = cfg.params
    cfg.eos = _eos(p["eos"])
    _number(p, "rho0", True)
    _number(p, "u0", True)
    _number(p, "t_final", True)
    _number(p, "shock_tolerance_cells", True)
    _number(p, "shock_speed_tolerance", True)
    _int(p, "shock_speed_N", 2)
    res = p["resolutions"]
    if not isinstance(res, list) or len(res) < 2 or any(
            isinstance(v, bool) or not isinstance(v, int) or v < 2 for v in res):
        raise ConfigError("resolutions: expected a list of at least two integers >= 2")
    bub = p["bubble"]
    if not isinstance(bub, dict):
        raise ConfigError("bubble: expected an object")
    for key in bub:
        if key not in _BUBBLE_VERIFY:
            raise ConfigError(f"bubble.{key}: unknown key")
    merged = dict(_BUBBLE_VERIFY)
    merged.update(bub)
    if not merged["B"] < 0:
        raise ConfigError("bubble.B: the bubble requires B < 0")
    cfg.extra["bubble"] = merged


# --- output -------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return format(float(v), FLOAT_FMT)


def _json_value(v):
    if v is None or isinstance(v, (str, bool)):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    x = float(format(float(v), FLOAT_FMT))
    return x if math.isfinite(x) else None


def render_table(columns, rows, fmt):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    records = [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]
    return json.dumps(records, indent=1) + "\n"


def _write(cfg, text, name=None):
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / f"{name or cfg.subcommand}.{cfg.fmt}"
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _threads():
    raw = os.environ.get("ISO_EULER_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"ISO_EULER_THREADS: expected an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("ISO_EULER_THREADS: must be >= 1")
    return n


# --- subcommands ----------------------------------------------------------------

def cmd_noh(cfg):
    p = cfg.params
    eos = cfg.eos
    if p["sie_zero_at_rho0"] and not isinstance(eos, PolytropicCaseIEos):
        eos = eos.with_sie_zero_at(p["rho0"])
    if p["spacing"] == "log":
        u0s = np.geomspace(p["u0_min"], p["u0_max"], p["num_points"])
    else:
        u0s = np.linspace(p["u0_min"], p["u0_max"], p["num_points"])
    rho0 = float(p["rho0"])
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        shocks = list(pool.map(lambda u0: solve_noh_shock(eos, rho0, float(u0)), u0s))
    rows = [noh_row(eos, s) for s in shocks]
    return [_write(cfg, render_table(NOH_COLUMNS, rows, cfg.fmt))]


BUBBLE_COLUMNS = ("n", "xi0", "xi", "r", "t", "u", "rho", "P", "I", "region")


def cmd_bubble(cfg):
    p = cfg.params
    t = float(p["t"])
    rows = []
    for n in p["n"]:
        sol = bubble_solution(n, p["B"], p["rho_ref"], p["I0"])
        xi = np.linspace(0.0, sol.xi0, p["num_points"] + 1)[1:]
        f = bubble_fields(sol, xi * t, t)
        for i in range(xi.size):
            rows.append((n, sol.xi0, xi[i], xi[i] * t, t, f.u[i], f.rho[i], f.P[i], f.I[i],
                         "bubble"))
    return [_write(cfg, render_table(BUBBLE_COLUMNS, rows, cfg.fmt))]


def cmd_similarity(cfg):
    p = cfg.params
    init = p["initial"]
    if p["case"] == "I":
        a1, a2, a3 = p["a"]
        traj = integrate_case1(a1, a2, a3, p["A1"], p["n"],
                               CaseITransformedState(init["J"], init["W"]), init["xi"],
                               p["J_end"], tol=p["tol"], atol=p["atol"])
    else:
        _, pl = derive_exponents(*p["a"])
        traj = integrate_reduced(pl, cfg.eos, SimilarityState(init["xi"], init["w"], init["j"]),
                                 p["xi_end"], n=p["n"], r=p["r"], tol=p["tol"], atol=p["atol"])
    if traj.message:
        log.info("similarity: %s (%s)", traj.reason, traj.message)
    return [_write(cfg, render_table(SimilarityTrajectory.COLUMNS, list(traj.rows()), cfg.fmt))]


def run_verify(cfg):
    """Run the convergence suites; returns (report dict, passed flag)."""
    p = cfg.params
    eos = cfg.eos
    reports = [fvcheck.run_noh(eos, p["u0"], p["rho0"], N, p["t_final"])[1]
               for N in p["resolutions"]]
    noh_conv = fvcheck.convergence_report(reports)
    errs = [r["L1_rho"] for r in noh_conv]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    offset = reports[-1].shock_offset_cells
    sol_speed = noh_solution(eos, p["rho0"], p["u0"]).D0
    t_f = p["t_final"]
    measured = fvcheck.measure_shock_speed(eos, p["u0"], p["rho0"], p["shock_speed_N"],
                                           0.5 * t_f, t_f)
    speed_err = abs(measured - sol_speed) / sol_speed
    checks = {
        "noh_l1_rho_decreasing": decreasing,
        "noh_shock_offset_cells": offset,
        "noh_shock_within_tolerance": offset <= p["shock_tolerance_cells"],
        "noh_shock_speed_measured": measured,
        "noh_shock_speed_exact": sol_speed,
        "noh_shock_speed_within_tolerance": speed_err <= p["shock_speed_tolerance"],
    }
    bub = cfg.extra["bubble"]
    bubble = {}
    for n in bub["n"]:
        sol = bubble_solution(n, bub["B"], bub["rho_ref"])
        reps = [fvcheck.run_bubble(sol, N, bub["t0"], bub["t_final"])[1]
                for N in bub["resolutions"]]
        conv = fvcheck.convergence_report(reps)
        bubble[str(n)] = conv
        checks[f"bubble_n{n}_order_ok"] = min(r["order"] for r in conv[1:]) >= bub["min_order"]
    passed = all(v for k, v in checks.items() if k.endswith(("_ok", "_tolerance", "_decreasing")))
    return {"noh": noh_conv, "bubble": bubble, "checks": checks, "passed": passed}, passed


def cmd_verify(cfg):
    report, passed = run_verify(cfg)
    if cfg.fmt == "json":
        text = json.dumps(_jsonify(report), indent=1, sort_keys=True) + "\n"
    else:
        rows = [("noh", r["N"], r["L1_rho"], r["order"]) for r in report["noh"]]
        for n, conv in report["bubble"].items():
            rows += [(f"bubble_n{n}", r["N"], r["L1_rho"], r["order"]) for r in conv]
        text = render_table(("suite", "N", "L1_rho", "order"), rows, "csv")
    paths = [_write(cfg, text)]
    cfg.extra["passed"] = passed
    return paths


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return _json_value(obj)


def build_parser():
    parser = argparse.ArgumentParser(prog="iso-euler", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", default=Path("."), type=Path)
        sp.add_argument("--format", default="csv", choices=("csv", "json"))
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        try:
            raw = json.loads(args.config.read_text())
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from None
        cfg = load_config(args.subcommand, raw, args.out, args.format)
        handler = {"noh": cmd_noh, "bubble": cmd_bubble, "similarity": cmd_similarity,
                   "verify": cmd_verify}[args.subcommand]
        paths = handler(cfg)
    except ConfigError as exc:
        print(f"iso-euler: config error: {exc}", file=sys.stderr)
        return 2
    except (IsoEulerError, ArithmeticError, ValueError) as exc:
        print(f"iso-euler: numerical failure: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        log.info("wrote %s", path)
    if args.subcommand == "verify" and not cfg.extra.get("passed", False):
        print("iso-euler: verification thresholds not met", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
