"""``vexpdo`` command-line entry point.

Usage::

    vexpdo <norm|check-exponent|apply|fredholm|verify> --config PATH
           [--format json|csv] [--only MODULE] [--out PATH] [--tolerance TOL]

Exit status: 0 success, 1 acceptance failure, 2 config error,
3 numeric or module error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from .config import (ExperimentConfig, build_exponent, build_function, build_grid,
                     build_probe_spec, build_symbol, load_config)
from .errors import ConfigError, InfeasibleDecompositionError, VexpdoError
from .exponent import (best_p_infinity, check_bounds, check_log_holder_infinity,
                       check_log_holder_local, check_nekvinda, log_holder_infinity_sweep,
                       mstar_decompose, mstar_recombine)
from .fredholm import run_fredholm_pipeline
from .maximal import hl_maximal, q_maximal, sharp_maximal
from .modular import luxemburg_norm
from .oracles import discrete_lp_norm
from .pdo import apply, apply_multiplier

EXIT_OK, EXIT_ACCEPTANCE, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

CHECKERS = ("bounds", "log_holder_local", "log_holder_infinity", "log_holder_infinity_sweep",
            "nekvinda", "mstar")
OPERATORS = ("pdo", "multiplier", "M", "Mq", "Msharp")


class CommandFailed(Exception):
    """A command produced a report but must exit nonzero."""

    def __init__(self, status, message):
        super().__init__(message)
        self.status = status


def plain(obj):
    """Convert numpy scalars, arrays and tuples to JSON-ready Python types."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.generic):
        return plain(obj.item())
    if isinstance(obj, complex):
        return {"real": obj.real, "imag": obj.imag}
    return obj


def dump_json(report) -> str:
    return json.dumps(plain(report), indent=2, sort_keys=True) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _format(args, cfg):
    fmt = args.format or cfg.get("output", "format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"{cfg.source}: [output] format = {fmt!r}; expected json or csv", field="output.format")
    return fmt


def _out(args, cfg):
    return args.out or cfg.get("output", "path")


# -- commands -----------------------------------------------------------------


def cmd_norm(cfg: ExperimentConfig, fmt="json", out=None):
    grid = build_grid(cfg)
    p = build_exponent(cfg, grid)
    f = build_function(cfg, grid)
    res = luxemburg_norm(f, p.require_admissible(), cfg.number("tolerances", "norm", 1e-10, low=0.0))
    if fmt == "csv":
        _emit(dump_csv(["value", "iterations", "modular_at_value"],
                       [[res.value, res.iterations, res.modular_at_value]]), out)
    else:
        _emit(dump_json({"exponent": p.name, "grid": {"dim": grid.dim, "L": grid.L, "N": grid.N},
                         "norm": res.to_dict()}), out)
    return res


def _run_checker(name, cfg, p):
    threshold = cfg.number("operation", "threshold", 10.0, low=0.0)
    p_inf = cfg.number("operation", "p_inf", None)
    if name == "bounds":
        return check_bounds(p).to_dict()
    if name == "log_holder_local":
        return check_log_holder_local(p, threshold).to_dict()
    if name == "log_holder_infinity":
        return check_log_holder_infinity(p, p_inf, threshold).to_dict()
    if name == "log_holder_infinity_sweep":
        widths = cfg.numbers("operation", "half_widths", [p.grid.L, 2 * p.grid.L, 4 * p.grid.L])
        return log_holder_infinity_sweep(p, widths, p_inf, threshold).to_dict()
    if name == "nekvinda":
        c = cfg.number("operation", "nekvinda_c", 0.5, low=0.0)
        return check_nekvinda(p, best_p_infinity(p) if p_inf is None else p_inf, c,
                              cfg.number("operation", "nekvinda_threshold", 1e3)).to_dict()
    p0 = cfg.number("operation", "p0", 2.0)
    theta = cfg.number("operation", "theta", 0.5)
    try:
        p1 = mstar_decompose(p, p0, theta)
    except InfeasibleDecompositionError as exc:
        return {"condition": "mstar", "holds": False, "error": str(exc),
                "node": list(exc.node), "x": list(p.grid.node(exc.node)), "value": exc.value}
    back = mstar_recombine(p0, theta, p1)
    return {"condition": "mstar", "holds": True, "p0": p0, "theta": theta,
            "p1_min": p1.p_minus, "p1_max": p1.p_plus,
            "reconstruction_error": float(np.abs(back.values - p.values).max())}


def cmd_check_exponent(cfg: ExperimentConfig, fmt="json", out=None):
    """Run the checkers named in ``[operation] checks`` (default: all)."""
    grid = build_grid(cfg)
    p = build_exponent(cfg, grid)
    names = cfg.get("operation", "checks", ",".join(CHECKERS)).replace(",", " ").split()
    unknown = [n for n in names if n not in CHECKERS]
    if unknown:
        raise ConfigError(f"{cfg.source}: [operation] checks: unknown checker {unknown[0]!r}; "
                          f"expected some of {', '.join(CHECKERS)}", field="operation.checks")
    reports = [_run_checker(n, cfg, p) for n in names]
    if fmt == "csv":
        _emit(dump_csv(["condition", "holds", "best_constant"],
                       [[r["condition"], r["holds"], r.get("best_constant", "")] for r in reports]), out)
    else:
        _emit(dump_json({"exponent": p.name, "reports": reports}), out)
    failed = [r for r in reports if "error" in r]
    if failed:
        raise CommandFailed(EXIT_NUMERIC, failed[0]["error"])
    return reports


def cmd_apply(cfg: ExperimentConfig, fmt="json", out=None):
    grid = build_grid(cfg)
    u = build_function(cfg, grid)
    op = cfg.get("operation", "operator", "pdo")
    k_max = cfg.number("operation", "k_max", None, int, low=0)
    if op == "pdo":
        a = build_symbol(cfg, grid.dim)
        v, label = apply(a, u), a.name
    elif op == "multiplier":
        a = build_symbol(cfg, grid.dim)
        v, label = apply_multiplier(a, u), a.name
    elif op == "M":
        v, label = hl_maximal(u, k_max), "M"
    elif op == "Mq":
        q = cfg.number("operation", "q", 2.0, low=1.0)
        v, label = q_maximal(u, q, k_max), f"M_{q:g}"
    elif op == "Msharp":
        v, label = sharp_maximal(u, k_max), "M#"
    else:
        raise ConfigError(f"{cfg.source}: [operation] operator = {op!r}; expected one of {', '.join(OPERATORS)}",
                          field="operation.operator")
    summary = {
        "operator": label,
        "max_abs_deviation_from_input": float(np.abs(v.values - u.values).max()),
        "l2_input": discrete_lp_norm(u.values, 2.0, grid.cell_volume),
        "l2_output": discrete_lp_norm(v.values, 2.0, grid.cell_volume),
        "sup_output": float(np.abs(v.values).max()),
    }
    if "exponent" in cfg.sections:
        p = build_exponent(cfg, grid).require_admissible()
        summary["exponent"] = p.name
        summary["lp_input"] = luxemburg_norm(u, p).value
        summary["lp_output"] = luxemburg_norm(v, p).value
    coords = [c.ravel() for c in grid.coords]
    vals = v.values.ravel()
    if fmt == "csv":
        header = [f"x{i + 1}" for i in range(grid.dim)] + ["real", "imag"]
        rows = [[*(float(c[k]) for c in coords), float(vals[k].real), float(vals[k].imag)]
                for k in range(vals.size)]
        _emit(dump_csv(header, rows), out)
    else:
        summary["values"] = {"real": vals.real, "imag": vals.imag}
        _emit(dump_json(summary), out)
    return v, summary


def cmd_fredholm(cfg: ExperimentConfig, fmt="json", out=None):
    """Run the regularizer pipeline; writes a CSV decay table next to ``out``."""
    grid = build_grid(cfg)
    p = build_exponent(cfg, grid)
    a = build_symbol(cfg, grid.dim)
    mstar = None
    if "p0" in cfg.section("operation") or "theta" in cfg.section("operation"):
        mstar = (cfg.number("operation", "p0", 2.0), cfg.number("operation", "theta", 0.5))
    report = run_fredholm_pipeline(
        a, p, build_probe_spec(cfg),
        eps=cfg.number("operation", "eps", 1e-3, low=0.0),
        mstar=mstar,
        with_conjugate=cfg.get("operation", "conjugate", "no").lower() in ("1", "yes", "true", "on"),
        slack=cfg.number("tolerances", "monotone_slack", 1.05, low=1.0),
        factor=cfg.number("tolerances", "decay_factor", 0.25, low=0.0),
    )
    if fmt == "csv":
        _emit(report.to_csv(), out)
    else:
        _emit(dump_json(report.to_dict()), out)
        if out is not None:
            Path(out).with_suffix(".csv").write_text(report.to_csv(), encoding="utf-8")
    if report.verdict == "elliptic-fail":
        raise CommandFailed(EXIT_NUMERIC, f"{a.name}: ellipticity-fail ({report.notes[-1]})")
    return report


def cmd_verify(cfg: ExperimentConfig, fmt=None, out=None, only=None, tolerance=None):
    """Run the acceptance suite; ``tolerance`` overrides every criterion tolerance.

    Without a format or output path a human-readable table is printed.
    """
    if tolerance is None:
        tolerance = cfg.number("tolerances", "override", None, low=0.0)
    modules = {m for c in acceptance.CRITERIA for m in c.modules}
    if only is not None and only not in modules:
        raise ConfigError(f"--only {only!r}: no criterion covers that module; "
                          f"expected one of {', '.join(sorted(modules))}", field="only")
    results = acceptance.run_criteria(only=only, tolerance=tolerance)
    if fmt == "csv":
        text = dump_csv(["criterion", "passed", "elapsed", "detail"],
                        [[r.criterion.number, r.passed, r.elapsed, r.detail] for r in results])
    elif fmt == "json" or out is not None:
        text = dump_json([{"criterion": r.criterion.number, "title": r.criterion.title,
                           "passed": r.passed, "detail": r.detail} for r in results])
    else:
        text = "\n".join(acceptance.format_result(r) for r in results) + "\n"
    _emit(text, out)
    failing = [r for r in results if not r.passed]
    if failing:
        c = failing[0].criterion
        raise CommandFailed(EXIT_ACCEPTANCE, f"criterion {c.number} ({c.title}) failed; "
                                             f"{len(failing)} of {len(results)} failing")
    return results


COMMANDS = {
    "norm": cmd_norm,
    "check-exponent": cmd_check_exponent,
    "apply": cmd_apply,
    "fredholm": cmd_fredholm,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vexpdo", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="experiment config file (optional for verify)")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--only", help="verify: restrict to criteria of one module")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--tolerance", type=float, help="verify: override every criterion tolerance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None and args.command != "verify":
            raise ConfigError(f"{args.command} requires --config", field="config")
        cfg = load_config(args.config)
        fmt, out = _format(args, cfg), _out(args, cfg)
        if args.command == "verify":
            cmd_verify(cfg, args.format, out, args.only, args.tolerance)
        else:
            COMMANDS[args.command](cfg, fmt, out)
    except ConfigError as exc:
        print(f"vexpdo: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CommandFailed as exc:
        print(f"vexpdo: {exc}", file=sys.stderr)
        return exc.status
    except (VexpdoError, ArithmeticError, ValueError) as exc:
        print(f"vexpdo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
