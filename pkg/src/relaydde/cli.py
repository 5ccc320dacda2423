"""Command-line front end: solve, map, verify-table, sweep, smooth.

Exit codes: 0 success, 1 computation failure (degenerate map, bracket
failure, runaway), 2 invalid arguments or configuration.  File outputs are
written atomically and deterministically.
"""

import argparse
import os
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import analysis, exact, reporting, smooth
from .errors import InvalidParameterError, RelayDDEError
from .model import ConstantHistory, Params, SmoothingConfig
from .return_map import map_report
from .smooth import IntegratorConfig, convergence_study, step_for_delta


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise InvalidParameterError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise InvalidParameterError(f"malformed config file {path}: {exc}")


def _pick(flag_value, config, section, key, default=None):
    """Flags win over the config file; the default applies last."""
    if flag_value is not None:
        return flag_value
    return config.get(section, {}).get(key, default)


def _resolve_params(args, config) -> Params:
    values = {}
    for name in ("a1", "a2", "p1", "p2"):
        value = _pick(getattr(args, name), config, "params", name)
        if value is None:
            raise InvalidParameterError(f"missing parameter {name} (flag --{name} or [params] section)")
        values[name] = float(value)
    return Params(**values)


def _resolve_delta(args, config) -> float:
    return float(_pick(getattr(args, "delta", None), config, "smoothing", "delta", 0.0))


def _resolve_integrator(args, config, delta) -> IntegratorConfig:
    step = _pick(getattr(args, "step", None), config, "integrator", "step")
    if step is None:
        step = step_for_delta(delta) if delta > 0.0 else 1e-3
    interpolation = _pick(
        getattr(args, "interpolation", None), config, "integrator", "interpolation", "cubic"
    )
    return IntegratorConfig(step=float(step), interpolation=interpolation)


def _add_param_flags(parser):
    for name in ("a1", "a2", "p1", "p2"):
        parser.add_argument(f"--{name}", type=float, default=None, help=f"gain parameter {name}")
    parser.add_argument("--config", default=None, help="TOML config file; flags override it")


def _parse_axis(text):
    """Axis spec NAME=START:STOP:COUNT or NAME=VALUE."""
    try:
        name, _, spec = text.partition("=")
        if not spec:
            raise ValueError("missing '='")
        if name not in ("a1", "a2", "p1", "p2"):
            raise ValueError(f"unknown parameter {name!r}")
        parts = spec.split(":")
        if len(parts) == 1:
            return name, [float(parts[0])]
        if len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError("count must be at least 1")
            return name, np.linspace(start, stop, count).tolist()
        raise ValueError("expected NAME=VALUE or NAME=START:STOP:COUNT")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad axis spec {text!r}: {exc}")


def _parse_deltas(text):
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
        if not values:
            raise ValueError("empty list")
        return values
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad delta list {text!r}: {exc}")


def cmd_solve(args) -> int:
    config = _load_config(args.config)
    params = _resolve_params(args, config)
    delta = _resolve_delta(args, config)
    h = _pick(args.h, config, "solve", "h")
    horizon = _pick(args.horizon, config, "solve", "horizon")
    if h is None or horizon is None:
        raise InvalidParameterError("solve requires --h and --horizon")
    h = float(h)
    horizon = float(horizon)
    sample_step = float(_pick(args.sample_step, config, "solve", "sample_step", 0.01))
    T = params.period

    if delta == 0.0:
        traj = exact.solve_exact(params, h, horizon)
        zeros = exact.zero_crossings(traj)
        x_at_T = traj.value(T) if horizon >= T else None
        ts = exact.sample_times(horizon, sample_step)
        xs = traj.sample(ts)
    else:
        icfg = _resolve_integrator(args, config, delta)
        traj = smooth.integrate(params, SmoothingConfig(delta), icfg, ConstantHistory(h), horizon)
        zeros = traj.zero_crossings()
        x_at_T = traj.value(T) if horizon >= T else None
        ts = exact.sample_times(horizon, sample_step)
        xs = traj.value(ts)

    reporting.write_csv(args.trajectory_csv, ["t", "x"], zip(ts.tolist(), np.asarray(xs).tolist()))
    summary = {
        "zeros": zeros,
        "slowly_oscillating": exact.is_slowly_oscillating(zeros),
        "x_at_T": x_at_T,
    }
    reporting.write_json(args.summary_json, summary)
    print(f"wrote {args.trajectory_csv} and {args.summary_json}")
    return 0


def cmd_map(args) -> int:
    config = _load_config(args.config)
    params = _resolve_params(args, config)
    sys.stdout.write(reporting.json_dumps(map_report(params)))
    return 0


def _load_rows(path):
    import json

    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise InvalidParameterError(f"rows file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"malformed rows file {path}: {exc}")
    rows = []
    try:
        for item in raw:
            rows.append(
                analysis.TableRow(
                    a1=float(item["a1"]),
                    a2=float(item["a2"]),
                    p1=float(item["p1"]),
                    p2=float(item["p2"]),
                    h_star_expected=float(item["h_star"]),
                    T_expected=float(item["T"]),
                    h_star_tolerance=float(item.get("h_star_tolerance", 0.005)),
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameterError(f"bad row entry in {path}: {exc}")
    return rows


def cmd_verify_table(args) -> int:
    rows = _load_rows(args.rows) if args.rows else None
    report = analysis.verify_table(rows)
    reporting.write_json(args.report, report)
    for entry in report["rows"]:
        status = "pass" if entry.get("passed") else "FAIL"
        print(f"row {entry['index']}: {status}")
    print(f"wrote {args.report}")
    return 0 if report["all_passed"] else 1


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    axes = {}
    for name, values in args.axis or []:
        axes[name] = values
    for name in ("a1", "a2", "p1", "p2"):
        if name not in axes:
            base = _pick(getattr(args, name), config, "params", name)
            if base is None:
                raise InvalidParameterError(
                    f"parameter {name} needs an --axis spec or a base value"
                )
            axes[name] = [float(base)]
    jobs = args.jobs if args.jobs is not None else int(os.environ.get("DDE_JOBS", "1"))
    report = analysis.sweep(axes, jobs=jobs)
    report.write_csv(args.csv)
    report.write_json(args.json)
    print(f"wrote {args.csv} and {args.json} ({len(report.cells)} cells)")
    return 0


def cmd_smooth(args) -> int:
    config = _load_config(args.config)
    params = _resolve_params(args, config)
    deltas = args.deltas
    if deltas is None:
        deltas = config.get("smooth", {}).get("deltas", list(smooth.DEFAULT_DELTA_GRID))
    base_step = _pick(args.step, config, "integrator", "step", 1e-3)
    interpolation = _pick(args.interpolation, config, "integrator", "interpolation", "cubic")
    report = convergence_study(
        params, deltas, base_step=float(base_step), interpolation=interpolation
    )
    reporting.write_json(args.report, report)
    print(f"wrote {args.report}")
    failures = [err for err in report["errors"] if err is not None]
    return 1 if len(failures) == len(report["delta"]) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaydde",
        description=(
            "Simulation and return-map analysis of the unit-delay relay equation "
            "x'(t) = a(t) * f(x(t-1)) with periodic piecewise-constant gain"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="integrate one trajectory and write CSV + JSON summary")
    _add_param_flags(p_solve)
    p_solve.add_argument("--h", type=float, default=None, help="constant history value")
    p_solve.add_argument("--horizon", type=float, default=None, help="integration horizon")
    p_solve.add_argument("--delta", type=float, default=None, help="smoothing half-width (0 = exact)")
    p_solve.add_argument("--step", type=float, default=None, help="integrator step (delta > 0)")
    p_solve.add_argument("--interpolation", choices=("cubic", "linear"), default=None)
    p_solve.add_argument("--sample-step", dest="sample_step", type=float, default=None)
    p_solve.add_argument("--trajectory-csv", default="solve_trajectory.csv")
    p_solve.add_argument("--summary-json", default="solve_summary.json")
    p_solve.set_defaults(func=cmd_solve)

    p_map = sub.add_parser("map", help="print return-map coefficients and conditions as JSON")
    _add_param_flags(p_map)
    p_map.set_defaults(func=cmd_map)

    p_verify = sub.add_parser("verify-table", help="check the embedded reference parameter table")
    p_verify.add_argument("--rows", default=None, help="JSON file with alternative rows")
    p_verify.add_argument("--report", default="verify_table_report.json")
    p_verify.set_defaults(func=cmd_verify_table)

    p_sweep = sub.add_parser("sweep", help="classify a parameter grid")
    _add_param_flags(p_sweep)
    p_sweep.add_argument(
        "--axis",
        action="append",
        type=_parse_axis,
        metavar="NAME=START:STOP:COUNT",
        help="axis spec; NAME=VALUE pins a single value",
    )
    p_sweep.add_argument("--jobs", type=int, default=None, help="worker count (default $DDE_JOBS or 1)")
    p_sweep.add_argument("--csv", default="sweep_report.csv")
    p_sweep.add_argument("--json", default="sweep_report.json")
    p_sweep.set_defaults(func=cmd_sweep)

    p_smooth = sub.add_parser("smooth", help="smoothing convergence study over a delta grid")
    _add_param_flags(p_smooth)
    p_smooth.add_argument("--deltas", type=_parse_deltas, default=None, metavar="D1,D2,...")
    p_smooth.add_argument("--step", type=float, default=None, help="base integrator step")
    p_smooth.add_argument("--interpolation", choices=("cubic", "linear"), default=None)
    p_smooth.add_argument("--report", default="smooth_report.json")
    p_smooth.set_defaults(func=cmd_smooth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RelayDDEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    run()
