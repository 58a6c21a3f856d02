"""Command-line front end.

Every subcommand writes a table as CSV (default) or JSON. Settings come from
built-in defaults, then an optional flat ``key = value`` config file, then
flags. Exit codes: 0 success, 1 computational failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import blowup, oscillation, quadrature, threshold
from .core import AirySpec, Direction
from .errors import (HypothesisViolated, InvalidBracket, InvalidConfig, NoBlowUpDetected,
                     NotBounded, PainleveError, StepFailure, ToleranceNotMet)
from .integrate import SolverConfig, TerminalKind, integrate

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

DEFAULT_GRID = (100.0, 4.0, 1.0, 0.0001)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    horizon: float = blowup.DEFAULT_HORIZON
    output_format: str = "csv"
    output_path: str | None = None
    sigma_grid: tuple = DEFAULT_GRID
    seed: int = 0
    precision: int = 12
    jobs: int = 1

    def __post_init__(self):
        if self.output_format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.output_format!r}; use csv or json")
        if any(not (math.isfinite(x) and x > 0) for x in self.sigma_grid):
            raise UsageError("sigma grid values must be positive")
        if not self.horizon > 0:
            raise UsageError("horizon must be positive")
        if self.precision < 1:
            raise UsageError("precision must be at least 1")


_SOLVER_KEYS = {f.name for f in fields(SolverConfig)}
_RUN_KEYS = {"horizon": float, "format": str, "out": str, "sigma_grid": str, "seed": int,
             "precision": int, "jobs": int}


def parse_grid(text) -> tuple:
    if isinstance(text, (tuple, list)):
        values = [float(x) for x in text]
    else:
        values = [float(x) for x in str(text).replace(";", ",").split(",") if x.strip()]
    out = []
    for x in values:
        if x not in out:
            out.append(x)
    return tuple(out)


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    settings = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _SOLVER_KEYS and key not in _RUN_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        settings[key] = value
    return settings


def build_run_config(args: argparse.Namespace) -> RunConfig:
    settings = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key in _SOLVER_KEYS | set(_RUN_KEYS):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    solver_kw = {}
    for key in _SOLVER_KEYS:
        if key in settings:
            solver_kw[key] = int(float(settings[key])) if key == "max_steps" else float(settings[key])
    try:
        solver = SolverConfig(**solver_kw)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from None
    run = RunConfig(solver=solver)
    conv = {"horizon": ("horizon", float), "format": ("output_format", str),
            "out": ("output_path", str), "sigma_grid": ("sigma_grid", parse_grid),
            "seed": ("seed", int), "precision": ("precision", int), "jobs": ("jobs", int)}
    updates = {}
    for key, (attr, fn) in conv.items():
        if key in settings:
            try:
                updates[attr] = fn(settings[key])
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {exc}") from None
    return replace(run, **updates)


def _fmt(value, precision):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, f".{precision}g")
    return str(value)


def _json_value(value, precision):
    if isinstance(value, float) and not isinstance(value, bool):
        if not math.isfinite(value):
            return None
        return float(format(value, f".{precision}g"))
    return value


def render(columns, rows, meta, fmt="csv", precision=12) -> str:
    """Serialise a table; CSV puts ``meta`` in leading ``# key=value`` lines."""
    if fmt == "json":
        doc = {"meta": {k: _json_value(v, precision) for k, v in meta.items()},
               "rows": [{c: _json_value(r.get(c), precision) for c in columns} for r in rows]}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={_fmt(v, precision)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r.get(c), precision) for c in columns])
    return buf.getvalue()


def emit(run: RunConfig, columns, rows, meta=None):
    text = render(columns, rows, meta or {}, run.output_format, run.precision)
    if run.output_path:
        with open(run.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _positive_sigma(value: float) -> float:
    if value == 0:
        raise UsageError("sigma must be positive: sigma = 0 is the identically zero solution")
    if value < 0:
        raise UsageError(f"sigma must be positive; for sigma = {value} run with "
                         f"{-value} and negate s (the equation is odd in s)")
    return value


# subcommands

def cmd_integrate(args, run: RunConfig) -> int:
    sigma = _positive_sigma(args.sigma)
    traj = integrate(sigma, Direction.parse(args.dir), args.t_end, run.solver)
    rows = [{"t": st.t, "s": st.s, "v": st.v} for st in traj.samples]
    meta = {"sigma": sigma, "direction": traj.direction.value,
            "terminal": traj.terminal.kind.value, "terminal_time": traj.terminal.time}
    emit(run, ["t", "s", "v"], rows, meta)
    if traj.terminal.kind is TerminalKind.STEP_FAILURE:
        print(f"step failure at t = {traj.terminal.time}: {traj.terminal.message}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _blowup_row(sigma, direction, solver, horizon):
    row = {"sigma": sigma}
    try:
        est = blowup.estimate_pole(sigma, direction, solver,
                                   horizon=None if direction is Direction.POSITIVE else horizon)
    except NoBlowUpDetected:
        row["flag"] = "no_blowup_detected"
        return row
    except StepFailure as exc:
        row["flag"] = f"step_failure: {exc}"
        return row
    row.update(t_pole=est.t_pole, lower=est.analytic_lower, upper=est.analytic_upper,
               residue=est.residue_slope, bracket_width=est.bracket_width,
               monotone=est.monotone)
    flags = []
    if not est.bounds_respected:
        flags.append("bounds_violated")
    if not est.simple_pole:
        flags.append("residue_off")
    row["flag"] = ";".join(flags)
    return row


def _blowup_task(item):
    return _blowup_row(*item)


def cmd_blowup(args, run: RunConfig) -> int:
    direction = Direction.parse(args.dir)
    tasks = [(s, direction, run.solver, run.horizon) for s in run.sigma_grid]
    if run.jobs > 1:
        with ProcessPoolExecutor(max_workers=run.jobs) as pool:
            rows = list(pool.map(_blowup_task, tasks))
    else:
        rows = [_blowup_task(t) for t in tasks]
    columns = ["sigma", "t_pole", "lower", "upper", "residue", "bracket_width", "monotone", "flag"]
    emit(run, columns, rows, {"direction": direction.value})
    return EXIT_OK


def cmd_threshold(args, run: RunConfig) -> int:
    try:
        br = threshold.find_threshold(args.lo, args.hi, args.width_goal, run.horizon, run.solver)
    except InvalidBracket as exc:
        print(f"invalid bracket: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    row = {"lo": br.lo, "hi": br.hi, "width": br.width, "iterations": br.iterations,
           "diagnostic": br.diagnostic}
    emit(run, ["lo", "hi", "width", "iterations", "diagnostic"], [row],
         {"width_goal": args.width_goal, "horizon": run.horizon})
    return EXIT_OK if br.width <= args.width_goal else EXIT_FAILURE


def cmd_sturm(args, run: RunConfig) -> int:
    sigma = _positive_sigma(args.sigma)
    rng = np.random.default_rng(run.seed)
    data = list(oscillation.AIRY_BASIS) + oscillation.random_airy_data(rng, args.random)
    t_max = args.t_max
    try:
        upper_reports = [oscillation.check_sturm_upper(sigma, args.T, t_max, run.solver,
                                                       airy_data=[g]) for g in data]
    except NotBounded as exc:
        print(f"not bounded: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except HypothesisViolated as exc:
        raise UsageError(str(exc)) from None
    zeros = oscillation.find_zeros(sigma, t_max, run.solver)
    rows = []
    for g0, h0 in data:
        rep = oscillation.check_sturm_lower(zeros, AirySpec(1.0, g0, h0), run.solver,
                                            include_origin=True)
        for a, b, w in rep.intervals:
            rows.append({"theorem": "lower", "g0": g0, "h0": h0, "a": a, "b": b,
                         "witness": w, "passed": w is not None})
    for (g0, h0), rep in zip(data, upper_reports):
        for a, b, w in rep.intervals:
            rows.append({"theorem": "upper", "g0": g0, "h0": h0, "a": a, "b": b,
                         "witness": w, "passed": w is not None})
    first = upper_reports[0]
    meta = {"sigma": sigma, "lambda": first.lam, "M": first.M, "T": first.T, "t_max": t_max,
            "seed": run.seed, "violations": sum(not r["passed"] for r in rows)}
    if first.notes:
        meta["note"] = "; ".join(first.notes)
    emit(run, ["theorem", "g0", "h0", "a", "b", "witness", "passed"], rows, meta)
    return EXIT_OK if meta["violations"] == 0 else EXIT_FAILURE


def cmd_quadrature(args, run: RunConfig) -> int:
    sigma = _positive_sigma(args.sigma)
    try:
        q1 = quadrature.integral_sigma_quartic(sigma)
        q3 = quadrature.integral_theorem3(sigma)
    except ToleranceNotMet as exc:
        print(f"tolerance not met: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    rows = [{"integral": "sigma_quartic", "value": q1.value, "error_estimate": q1.error_estimate,
             "subdivisions": q1.subdivisions, "bound": blowup.theorem2_upper(sigma)},
            {"integral": "theorem3", "value": q3.value, "error_estimate": q3.error_estimate,
             "subdivisions": q3.subdivisions, "bound": blowup.theorem3_lower(sigma)}]
    emit(run, ["integral", "value", "error_estimate", "subdivisions", "bound"], rows,
         {"sigma": sigma})
    return EXIT_OK


def _common(parser):
    parser.add_argument("--config", help="flat key = value settings file")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--rel-tol", dest="rel_tol", type=float)
    parser.add_argument("--abs-tol", dest="abs_tol", type=float)
    parser.add_argument("--max-step", dest="max_step", type=float)
    parser.add_argument("--switch-magnitude", dest="switch_magnitude", type=float)
    parser.add_argument("--event-tol", dest="event_tol", type=float)
    parser.add_argument("--horizon", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--precision", type=int, help="significant digits (default 12)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="painleve",
                                     description="Homogeneous Painleve II experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="tabulate one trajectory")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--dir", default="pos", choices=("pos", "neg"))
    p.add_argument("--t-end", dest="t_end", type=float, required=True)
    _common(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("blowup", help="pole times and bounds over a sigma grid")
    p.add_argument("--sigma-grid", dest="sigma_grid")
    p.add_argument("--dir", default="pos", choices=("pos", "neg"))
    p.add_argument("--jobs", type=int)
    _common(p)
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("threshold", help="bisect for the explosive/oscillatory threshold")
    p.add_argument("--lo", type=float, default=0.5)
    p.add_argument("--hi", type=float, default=0.9)
    p.add_argument("--width-goal", dest="width_goal", type=float, default=1e-4)
    _common(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("sturm", help="check both Airy comparison results")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--T", dest="T", type=float, required=True)
    p.add_argument("--t-max", dest="t_max", type=float, default=oscillation.DEFAULT_T_MAX)
    p.add_argument("--random", type=int, default=8, help="random Airy combinations to add")
    _common(p)
    p.set_defaults(func=cmd_sturm)

    p = sub.add_parser("quadrature", help="evaluate the two bound integrals")
    p.add_argument("--sigma", type=float, required=True)
    _common(p)
    p.set_defaults(func=cmd_quadrature)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        run = build_run_config(args)
        return args.func(args, run)
    except UsageError as exc:
        print(f"painleve {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PainleveError as exc:
        print(f"painleve {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
