"""Command-line front end.

Exit codes: 0 ok, 2 parse/usage error, 3 invariant violation, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import checks, examples, expansion, io, loewner_ode, regularity, trace
from .errors import (DriverDomainError, DriverSpecError, InvariantViolation, LoewnerError,
                     NumericalError)
from .specs import parse_driver

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_NUMERICAL = 0, 2, 3, 4
DEFAULTS = {"tol": 1e-10, "format": "csv", "seed": 0,
            "order": 5, "k": 1}
log = logging.getLogger("loewnerlab")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    driver: str | None
    grid: tuple | None
    tol: float
    epsilon: float | None
    output: str | None
    format: str


def parse_grid(text):
    """start:stop:count[:spacing] with spacing linear (default), sqrt or log."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise UsageError(f"grid {text!r} must be start:stop:count[:spacing]")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid {text!r} has a bad number") from None
    spacing = parts[3] if len(parts) == 4 else "linear"
    if n < 2:
        raise UsageError("grid count must be at least 2")
    if not b > a:
        raise UsageError("grid stop must exceed start")
    if spacing == "linear":
        return np.linspace(a, b, n)
    if spacing == "sqrt":
        if a < 0:
            raise UsageError("sqrt spacing needs start >= 0")
        g = np.linspace(math.sqrt(a), math.sqrt(b), n) ** 2
        g[0], g[-1] = a, b  # squaring can overshoot the endpoints
        return g
    if spacing == "log":
        if a <= 0:
            raise UsageError("log spacing needs start > 0")
        g = np.geomspace(a, b, n)
        g[0], g[-1] = a, b
        return g
    raise UsageError(f"unknown spacing {spacing!r} (linear, sqrt, log)")


def _grid_for(args, d, start=None, count=100, spacing="sqrt"):
    if args.grid:
        return parse_grid(args.grid)
    a = 0.01 * d.horizon if start is None else start
    return parse_grid(f"{a!r}:{d.horizon!r}:{count}:{spacing}")


def _tol(x):
    x = float(x)
    if not 1e-14 <= x <= 1e-2:
        raise argparse.ArgumentTypeError("tol must lie in [1e-14, 1e-2]")
    return x


def build_parser():
    p = argparse.ArgumentParser(prog="loewnerlab", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=True):
        sp.add_argument("--driver", help="driver spec, e.g. sine:1 or constant:0")
        if grid:
            sp.add_argument("--grid", help="start:stop:count[:linear|sqrt|log]")
        sp.add_argument("--tol", type=_tol)
        sp.add_argument("--output", "-o", help="output path (default stdout)")
        sp.add_argument("--format", choices=["csv", "json"])

    sp = sub.add_parser("trace", help="trace the curve on a time grid")
    common(sp)
    sp.add_argument("--epsilon", type=float, help="fixed regularization height instead "
                    "of the eps -> 0 limit")
    sp = sub.add_parser("derivs", help="gamma, gamma' and gamma'' on a grid")
    common(sp)
    sp = sub.add_parser("expand", help="base expansion coefficients")
    common(sp)
    sp.add_argument("--order", type=int)
    sp.add_argument("--n", type=int, help="also build the comparison map with this n")
    sp = sub.add_parser("regularity", help="Hoelder/Zygmund report of a curve")
    common(sp)
    sp.add_argument("--input", help="trace CSV/JSON produced by the trace command")
    sp.add_argument("--k", type=int)
    sp.add_argument("--window", help="dmin:dmax")
    sp.add_argument("--profile-csv", help="also write the delta profile as CSV")
    sp = sub.add_parser("example", help="closed-form golden examples")
    common(sp)
    sp.add_argument("--name", required=True,
                    choices=["marshall", "example1", "circle", "example2"])
    sp.add_argument("--param", help="comma-separated y values (marshall)")
    sp.add_argument("--t", help="comma-separated times (circle), instead of --grid")
    sp = sub.add_parser("check", help="run the invariant suite")
    common(sp, grid=False)
    sp.add_argument("--seed", type=int)
    return p


def _merge(args, config):
    for key, val in {**DEFAULTS, **config}.items():
        dest = key.replace("-", "_")
        if getattr(args, dest, None) is None and hasattr(args, dest):
            setattr(args, dest, val)
    return args


def _emit(text, output):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _driver(args, required=True):
    if not args.driver:
        if required:
            raise UsageError("--driver is required")
        return None
    return parse_driver(args.driver)


def cmd_trace(args):
    d = _driver(args)
    grid = _grid_for(args, d)
    if args.epsilon is not None:
        pts = np.array([loewner_ode.solve_tip(d, float(t), args.epsilon, 0.05 * args.tol).tip
                        for t in grid]) + d.eval(0.0)
        tr = trace.Trace(grid, pts, d.eval(0.0), np.full(grid.shape, args.epsilon + args.tol),
                         d, args.tol)
    else:
        tr = trace.trace_curve(d, grid, args.tol)
    _emit(io.trace_to_json(tr) if args.format == "json" else io.trace_to_csv(tr), args.output)


def cmd_derivs(args):
    d = _driver(args)
    grid = _grid_for(args, d)
    tr = trace.trace_curve(d, grid, args.tol, derivatives=True)
    header = ["t", "re", "im", "d1re", "d1im", "d2re", "d2im"]
    cols = [grid, tr.points.real, tr.points.imag, tr.d1.real, tr.d1.imag, tr.d2.real, tr.d2.imag]
    if args.format == "json":
        _emit(json.dumps({h: [float(v) for v in c] for h, c in zip(header, cols)}), args.output)
    else:
        import io as _io
        buf = _io.StringIO()
        io.write_table(header, cols, buf)
        _emit(buf.getvalue(), args.output)


def cmd_expand(args):
    d = _driver(args)
    order = args.order
    rep = (expansion.base_coefficients(d, order) if order <= 5
           else expansion.comparison_expansion(d, order))
    obj = json.loads(rep.to_json())
    if args.n:
        state = expansion.build_comparison(d, args.n)
        obj["b"] = [float(b) for b in state.b]
        obj["n"] = args.n
        if args.grid:
            grid = parse_grid(args.grid)
            vals = expansion.comparison_curve(state, grid)
            obj["samples"] = [[float(t), float(v.real), float(v.imag)]
                              for t, v in zip(grid, np.atleast_1d(vals))]
    _emit(json.dumps(obj), args.output)


def _window(text):
    if not text:
        return None
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError("window must be dmin:dmax") from None
    return a, b


def cmd_regularity(args):
    if args.input:
        tr = io.load_trace(args.input)
    else:
        d = _driver(args)
        tr = trace.trace_curve(d, _grid_for(args, d), args.tol)
    rep = regularity.curve_regularity(tr, args.k, _window(args.window))
    if args.profile_csv:
        with open(args.profile_csv, "w") as fh:
            fh.write(rep.profile_csv())
    obj = rep.to_dict()
    _emit(json.dumps(obj, sort_keys=True), args.output)


def cmd_example(args):
    import io as _io
    buf = _io.StringIO()
    if args.name in ("marshall", "example1"):
        ys = [float(v) for v in (args.param or "0.5").split(",")]
        rows = [(y, *examples.marshall_driver(y), examples.marshall_curve(y)) for y in ys]
        cols = list(zip(*rows))
        io.write_table(["y", "t", "lambda", "lambda_prime", "re", "im"],
                       [cols[0], cols[1], cols[2], cols[3], [z.real for z in cols[4]],
                        [z.imag for z in cols[4]]], buf)
    else:
        d, exact = examples.circle_example()
        if args.t:
            grid = np.array(sorted(float(v) for v in args.t.split(",")))
        else:
            grid = _grid_for(args, d, examples.T_SPLIT + 0.01, 50, "linear")
        tr = trace.trace_curve(d, grid, args.tol)
        ex = exact(grid)
        res = examples.circle_residual(tr.points)
        res = np.where(grid > examples.T_SPLIT, res, np.nan)
        io.write_table(["t", "lambda", "re", "im", "exact_re", "exact_im", "residual"],
                       [grid, d.sample(grid), tr.points.real, tr.points.imag, ex.real, ex.imag,
                        res], buf)
    _emit(buf.getvalue(), args.output)


def cmd_check(args):
    names = [args.driver] if args.driver else ["constant:0", "linear:1", "sine:1",
                                              "sqrtcircle:1.5,8"]
    failed = False
    lines = []
    for spec in names:
        d = parse_driver(spec)
        for r in checks.run_checks(d, args.tol, args.seed):
            lines.append(f"{spec} {r.line()}")
            failed |= not r.ok
    _emit("\n".join(lines) + "\n", args.output)
    if failed:
        raise InvariantViolation("invariant suite reported failures")


COMMANDS = {"trace": cmd_trace, "derivs": cmd_derivs, "expand": cmd_expand,
            "regularity": cmd_regularity, "example": cmd_example, "check": cmd_check}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    config = {}
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return EXIT_PARSE
    args = _merge(args, config)
    try:
        if "tol" in config:
            _tol(args.tol)
        COMMANDS[args.command](args)
    except (DriverSpecError, UsageError, DriverDomainError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except LoewnerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        # bad ranges or unreadable input files
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
