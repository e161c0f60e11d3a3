"""Config-driven command line front end.

Four subcommands share one JSON config format:

* ``verify``  runs a sweep, evaluates the configured checks, writes a JSON
  report plus a CSV table, and exits 0 only if every verdict passed.
* ``sweep``   same artifacts without verdicts, for external plotting.
* ``delta2``  prints the doubling-constant report for the configured Phi.
* ``oracle``  prints the closed-form indicator value with its validity flag.

Exit codes: 0 success, 1 verdict failure, 2 config error, 3 estimator or
other computation failure. Reports are deterministic functions of (config,
seed): keys are sorted, floats use shortest round-trip repr, and wall-clock
timing goes to stderr only, so repeated runs and different worker counts
produce byte-identical files. stdout carries nothing but the report path
(or, for delta2/oracle, the report JSON itself).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import replace

import numpy as np
import scipy

from . import __version__
from .level_sets import ESTIMATOR_METHODS, indicator_closed_form
from .radial_functions import Gaussian, PiecewiseConstantRadial, indicator
from .sweeps import (
    check_compact_bracket,
    check_identity,
    check_sandwich,
    check_universal_upper,
    gu_yung_specialize,
    make_t_grid,
    sweep,
)
from .young import (
    DegenerateYoungFunctionError,
    LLogL,
    PiecewiseLinearConvex,
    Power,
    PowerLog,
    delta2_constant,
)

__all__ = ["main", "ConfigError", "load_report"]

EXIT_OK = 0
EXIT_VERDICT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_COMPUTATION_FAILURE = 3

CSV_HEADER = "t,phi_t,value,std_error,bias_bound,method"

CHECK_NAMES = ("identity", "sandwich", "universal_upper", "compact_bracket", "gu_yung")

_DEFAULT_TOLERANCES = {
    "estimator": 1e-9,
    "identity": 1e-9,
    "sandwich": 1e-6,
    "universal": 1e-9,
    "bracket": 1e-9,
    "gu_yung_agreement": 1e-12,
    "gu_yung_limit": 0.01,
}


class ConfigError(ValueError):
    """Raised for anything wrong with the config; maps to exit code 2."""


# --- config loading and validation -----------------------------------------


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _check_keys(obj: dict, allowed: set, required: set, where: str):
    _require(isinstance(obj, dict), f"{where} must be a JSON object")
    unknown = set(obj) - allowed
    _require(not unknown, f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    _require(not missing, f"{where}: missing required keys {sorted(missing)}")


def _finite(x, where: str) -> float:
    _require(isinstance(x, (int, float)) and not isinstance(x, bool), f"{where} must be a number")
    x = float(x)
    _require(math.isfinite(x), f"{where} must be finite")
    return x


def _positive(x, where: str) -> float:
    x = _finite(x, where)
    _require(x > 0, f"{where} must be positive")
    return x


def _integer(x, where: str, minimum: int = 0) -> int:
    _require(
        isinstance(x, int) and not isinstance(x, bool), f"{where} must be an integer"
    )
    _require(x >= minimum, f"{where} must be >= {minimum}")
    return int(x)


def build_young(desc):
    _check_keys(desc, {"family", "p", "breakpoints"}, {"family"}, "young")
    family = desc.get("family")
    if family == "power":
        _check_keys(desc, {"family", "p"}, {"family", "p"}, "young (power)")
        return Power(_positive(desc["p"], "young.p"))
    if family == "power_log":
        _check_keys(desc, {"family", "p"}, {"family", "p"}, "young (power_log)")
        return PowerLog(_positive(desc["p"], "young.p"))
    if family == "llogl":
        _check_keys(desc, {"family"}, {"family"}, "young (llogl)")
        return LLogL()
    if family == "piecewise_linear":
        _check_keys(
            desc, {"family", "breakpoints"}, {"family", "breakpoints"}, "young (piecewise_linear)"
        )
        bps = desc["breakpoints"]
        _require(
            isinstance(bps, list)
            and all(isinstance(b, list) and len(b) == 2 for b in bps),
            "young.breakpoints must be a list of [t, value] pairs",
        )
        try:
            return PiecewiseLinearConvex(tuple((float(t), float(v)) for t, v in bps))
        except ValueError as exc:
            raise ConfigError(f"young.breakpoints: {exc}") from exc
    raise ConfigError(
        f"unknown young family {family!r}; expected power, power_log, llogl, piecewise_linear"
    )


def build_test_function(desc, dim: int):
    _check_keys(
        desc,
        {"kind", "radius", "height", "radii", "values", "amplitude", "width"},
        {"kind"},
        "test_function",
    )
    kind = desc.get("kind")
    try:
        if kind == "indicator":
            _check_keys(
                desc, {"kind", "radius", "height"}, {"kind", "radius", "height"},
                "test_function (indicator)",
            )
            return indicator(
                _positive(desc["radius"], "test_function.radius"),
                _finite(desc["height"], "test_function.height"),
                dim,
            )
        if kind == "piecewise_constant":
            _check_keys(
                desc, {"kind", "radii", "values"}, {"kind", "radii", "values"},
                "test_function (piecewise_constant)",
            )
            radii, values = desc["radii"], desc["values"]
            _require(
                isinstance(radii, list) and isinstance(values, list),
                "test_function radii and values must be lists",
            )
            return PiecewiseConstantRadial(tuple(radii), tuple(values), dim)
        if kind == "gaussian":
            _check_keys(
                desc, {"kind", "amplitude", "width"}, {"kind", "amplitude", "width"},
                "test_function (gaussian)",
            )
            return Gaussian(
                _finite(desc["amplitude"], "test_function.amplitude"),
                _positive(desc["width"], "test_function.width"),
                dim,
            )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"test_function: {exc}") from exc
    raise ConfigError(
        f"unknown test_function kind {kind!r}; expected indicator, piecewise_constant, gaussian"
    )


def _resolve_grid(tg) -> tuple:
    _check_keys(tg, {"t_max", "t_min", "count", "values"}, set(), "t_grid")
    if "values" in tg:
        _require(
            set(tg) == {"values"}, "t_grid: give either explicit values or t_max/t_min/count"
        )
        vals = tg["values"]
        _require(isinstance(vals, list) and vals, "t_grid.values must be a nonempty list")
        try:
            grid = tuple(_positive(v, "t_grid.values entry") for v in vals)
            arr = np.asarray(grid)
            _require(bool(np.all(np.diff(arr) < 0)), "t_grid.values must be strictly decreasing")
            return grid
        except ConfigError:
            raise
    _require(
        set(tg) == {"t_max", "t_min", "count"},
        "t_grid needs exactly t_max, t_min, count (or explicit values)",
    )
    try:
        return make_t_grid(
            _positive(tg["t_max"], "t_grid.t_max"),
            _positive(tg["t_min"], "t_grid.t_min"),
            _integer(tg["count"], "t_grid.count", minimum=2),
        )
    except ValueError as exc:
        raise ConfigError(f"t_grid: {exc}") from exc


def _resolve_tolerances(tols) -> dict:
    if tols is None:
        return dict(_DEFAULT_TOLERANCES)
    _check_keys(tols, set(_DEFAULT_TOLERANCES), set(), "tolerances")
    out = dict(_DEFAULT_TOLERANCES)
    for key, value in tols.items():
        out[key] = _positive(value, f"tolerances.{key}")
    return out


def _resolve_seed(cfg_seed, where: str = "seed") -> int:
    seed = _integer(cfg_seed, where, minimum=0)
    _require(seed < 2**64, f"{where} must fit in 64 bits")
    return seed


_SWEEP_KEYS = {
    "dimension",
    "young",
    "test_function",
    "t_grid",
    "method",
    "mc_budget",
    "seed",
    "tolerances",
    "workers",
    "truncation_radius",
    "output",
}
_VERIFY_KEYS = _SWEEP_KEYS | {"checks", "expected_modular"}
_REQUIRED = {"dimension", "young", "test_function", "t_grid", "method", "seed"}


def _validate_run_config(cfg: dict, command: str) -> tuple:
    """Validate and normalize a verify/sweep config.

    Returns (resolved, workers). The resolved dict is what gets echoed into
    the report, so every default is made explicit there; the worker count is
    returned separately because it must never reach the report.
    """
    allowed = _VERIFY_KEYS if command == "verify" else _SWEEP_KEYS
    _check_keys(cfg, allowed, _REQUIRED, "config")

    dim = _integer(cfg["dimension"], "dimension", minimum=1)
    _require(dim <= 10, "dimension must be at most 10")
    phi = build_young(cfg["young"])
    u = build_test_function(cfg["test_function"], dim)
    grid = _resolve_grid(cfg["t_grid"])
    method = cfg["method"]
    _require(
        method in ESTIMATOR_METHODS,
        f"method must be one of {list(ESTIMATOR_METHODS)}, got {method!r}",
    )
    budget = _integer(cfg.get("mc_budget", 100_000), "mc_budget", minimum=1)
    seed = _resolve_seed(cfg["seed"])
    tolerances = _resolve_tolerances(cfg.get("tolerances"))
    workers = _integer(cfg.get("workers", 1), "workers", minimum=1)

    truncation = cfg.get("truncation_radius")
    if truncation is not None:
        truncation = _positive(truncation, "truncation_radius")
        _require(
            not math.isfinite(u.support_radius) or truncation >= u.support_radius,
            "truncation_radius lies inside the support of the test function",
        )
    else:
        _require(
            method != "monte_carlo_full" or math.isfinite(u.support_radius),
            "monte_carlo_full on an unbounded test function needs truncation_radius",
        )
    if method == "semi_analytic_compact":
        _require(
            math.isfinite(u.support_radius),
            "semi_analytic_compact needs a compactly supported test function",
        )
    if method == "monte_carlo_full":
        _require(budget >= 10_000, "monte_carlo_full needs mc_budget >= 10000")

    output = cfg.get("output", {"report": "report.json", "table": "table.csv"})
    _check_keys(output, {"report", "table"}, {"report", "table"}, "output")
    _require(
        isinstance(output["report"], str) and isinstance(output["table"], str),
        "output paths must be strings",
    )

    # workers stays out of the resolved form on purpose: it may not influence
    # any emitted byte, and the report echoes the resolved config verbatim
    resolved = {
        "dimension": dim,
        "young": dict(cfg["young"]),
        "test_function": dict(cfg["test_function"]),
        "t_grid": {"values": [float(t) for t in grid]},
        "method": method,
        "mc_budget": budget,
        "seed": seed,
        "tolerances": tolerances,
        "truncation_radius": truncation,
        "output": dict(output),
    }

    if command == "verify":
        expected = cfg.get("expected_modular")
        if expected is not None:
            expected = _finite(expected, "expected_modular")
            _require(expected >= 0, "expected_modular must be nonnegative")
        resolved["expected_modular"] = expected

        checks = cfg.get("checks", "auto")
        if checks == "auto":
            names = ["identity", "sandwich", "universal_upper"]
            if math.isfinite(u.support_radius):
                names.append("compact_bracket")
            if isinstance(phi, Power):
                names.append("gu_yung")
        else:
            _require(
                isinstance(checks, list) and checks, "checks must be 'auto' or a nonempty list"
            )
            for name in checks:
                _require(name in CHECK_NAMES, f"unknown check {name!r}")
                if name == "compact_bracket":
                    _require(
                        math.isfinite(u.support_radius),
                        "compact_bracket needs a compactly supported test function",
                    )
                if name == "gu_yung":
                    _require(
                        isinstance(phi, Power),
                        "gu_yung needs the power young family",
                    )
            names = list(dict.fromkeys(checks))
        resolved["checks"] = names

    return resolved, workers


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    _require(isinstance(cfg, dict), "config root must be a JSON object")
    return cfg


# --- report emission --------------------------------------------------------


def _safe(x):
    """Floats become None when not finite so the report stays strict JSON."""
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _build_report(command: str, resolved_cfg: dict, result, phi, verdicts) -> dict:
    table = []
    for t, est in zip(result.t_values, result.estimates):
        if est is None:
            continue
        table.append(
            {
                "t": t,
                "phi_t": phi(t),
                "value": est.value,
                "std_error": est.std_error,
                "bias_bound": est.bias_bound,
                "method": est.method,
                "sample_count": est.sample_count,
                "flags": list(est.flags),
            }
        )
    fit = None
    if result.fit is not None:
        fit = {
            "intercept": result.fit.intercept,
            "slope": result.fit.slope,
            "intercept_std_error": result.fit.intercept_std_error,
            "residual_rms": result.fit.residual_rms,
            "points_used": result.fit.points_used,
        }
    report = {
        "schema_version": 1,
        "command": command,
        "config": resolved_cfg,
        "modular": result.modular_value,
        "limit_target": result.limit_target,
        "table": table,
        "failures": [{"index": i, "message": m} for i, m in result.failures],
        "fit": fit,
        "grid_sup": _safe(result.grid_sup),
        "grid_sup_t": _safe(result.grid_sup_t),
        "notes": [
            "grid_sup is the maximum over the finite threshold grid and is a "
            "lower bound for the supremum over all t; the sandwich lower "
            "verdict asserts attainment in the small-t limit only"
        ],
        "versions": {
            "orlicz_levelset": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    if verdicts is not None:
        report["verdicts"] = {
            v.name: {"passed": v.passed, "margin": _safe(v.margin), "detail": v.detail}
            for v in verdicts
        }
    return report


def _write_report(report: dict, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_table(report: dict, path: str):
    lines = [CSV_HEADER]
    for row in report["table"]:
        lines.append(
            ",".join(
                [
                    repr(float(row["t"])),
                    repr(float(row["phi_t"])),
                    repr(float(row["value"])),
                    repr(float(row["std_error"])),
                    repr(float(row["bias_bound"])),
                    row["method"],
                ]
            )
        )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def load_report(path: str) -> dict:
    """Read back a report produced by verify/sweep; the round-trip identity
    json -> dict -> json is exercised in the test suite."""
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# --- subcommand drivers -----------------------------------------------------


def _apply_overrides(cfg: dict, args) -> dict:
    cfg = dict(cfg)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.threads is not None:
        cfg["workers"] = args.threads
    return cfg


def _run_sweep_like(command: str, cfg: dict, out_dir: str) -> tuple:
    resolved, workers = _validate_run_config(cfg, command)
    dim = resolved["dimension"]
    phi = build_young(resolved["young"])
    u = build_test_function(resolved["test_function"], dim)
    grid = tuple(resolved["t_grid"]["values"])
    tols = resolved["tolerances"]

    result = sweep(
        u,
        phi,
        grid,
        method=resolved["method"],
        budget=resolved["mc_budget"],
        seed=resolved["seed"],
        tol=tols["estimator"],
        workers=workers,
        truncation_radius=resolved["truncation_radius"],
    )

    verdicts = None
    if command == "verify":
        # an incomplete sweep writes its report but earns no verdicts
        verdicts = []
    if command == "verify" and not result.failures:
        if resolved["expected_modular"] is not None:
            result = replace(result, modular_value=resolved["expected_modular"])
        for name in resolved["checks"]:
            if name == "identity":
                verdicts.append(check_identity(result, tol=tols["identity"]))
            elif name == "sandwich":
                verdicts.extend(check_sandwich(result, delta2_constant(phi), tol=tols["sandwich"]))
            elif name == "universal_upper":
                verdicts.append(check_universal_upper(result, u, phi, tol=tols["universal"]))
            elif name == "compact_bracket":
                verdicts.append(check_compact_bracket(result, u, phi, tol=tols["bracket"]))
            elif name == "gu_yung":
                verdicts.append(
                    gu_yung_specialize(
                        u,
                        phi.p,
                        grid,
                        method=resolved["method"],
                        budget=resolved["mc_budget"],
                        seed=resolved["seed"],
                        workers=workers,
                        truncation_radius=resolved["truncation_radius"],
                        agreement_tol=tols["gu_yung_agreement"],
                        limit_tol=tols["gu_yung_limit"],
                    )
                )
        result = result.with_verdicts({v.name: v for v in verdicts})

    report = _build_report(command, resolved, result, phi, verdicts)
    os.makedirs(out_dir, exist_ok=True)
    report_path = os.path.join(out_dir, resolved["output"]["report"])
    table_path = os.path.join(out_dir, resolved["output"]["table"])
    _write_report(report, report_path)
    _write_table(report, table_path)
    print(report_path)

    if result.failures:
        for _, message in result.failures:
            print(f"estimator failure: {message}", file=sys.stderr)
        if command == "verify":
            print("verdicts skipped: sweep incomplete", file=sys.stderr)
        return EXIT_COMPUTATION_FAILURE, report
    if verdicts is not None and not all(v.passed for v in verdicts):
        failed = [v.name for v in verdicts if not v.passed]
        print(f"verdicts failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERDICT_FAILURE, report
    return EXIT_OK, report


def _run_delta2(cfg: dict) -> int:
    _check_keys(cfg, {"young"}, {"young"}, "config")
    phi = build_young(cfg["young"])
    try:
        est = delta2_constant(phi)
    except DegenerateYoungFunctionError as exc:
        print(f"degenerate young function: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    payload = {
        "schema_version": 1,
        "command": "delta2",
        "estimate": est.estimate,
        "analytic": est.analytic,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _run_oracle(cfg: dict) -> int:
    _check_keys(cfg, {"dimension", "young", "oracle"}, {"dimension", "young", "oracle"}, "config")
    dim = _integer(cfg["dimension"], "dimension", minimum=1)
    _require(dim <= 10, "dimension must be at most 10")
    phi = build_young(cfg["young"])
    spec = cfg["oracle"]
    _check_keys(spec, {"radius", "height", "t"}, {"radius", "height", "t"}, "oracle")
    radius = _positive(spec["radius"], "oracle.radius")
    height = _finite(spec["height"], "oracle.height")
    t = _positive(spec["t"], "oracle.t")
    try:
        value, valid = indicator_closed_form(dim, radius, height, phi, t)
    except ValueError as exc:
        raise ConfigError(f"oracle: {exc}") from exc
    payload = {
        "schema_version": 1,
        "command": "oracle",
        "dimension": dim,
        "radius": radius,
        "height": height,
        "t": t,
        "weighted_value": value,
        "valid": valid,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orlicz-levelset",
        description="Level-set measures of difference quotients against Orlicz modulars.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("verify", "run a sweep, evaluate checks, write report.json and table.csv"),
        ("sweep", "run a sweep and write report.json and table.csv without verdicts"),
        ("delta2", "print the doubling-constant report for the configured Phi"),
        ("oracle", "print the closed-form indicator value with its validity flag"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument(
            "--threads", type=int, default=None, help="override the config worker count"
        )
        p.add_argument(
            "--out", default=".", help="directory for report and table output (default: cwd)"
        )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        cfg = load_config(args.config)
        if args.command in ("verify", "sweep"):
            cfg = _apply_overrides(cfg, args)
            code, _ = _run_sweep_like(args.command, cfg, args.out)
        elif args.command == "delta2":
            code = _run_delta2(cfg)
        else:
            code = _run_oracle(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except Exception as exc:  # estimator or other computation failure
        print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION_FAILURE
    finally:
        elapsed = time.monotonic() - started
        print(f"wall-clock: {elapsed:.3f} s", file=sys.stderr)
    return code
