"""Command-line front end: evaluate traces, print past forms, benchmark.

Exit codes: 0 on success, 1 for specification and usage problems (syntax,
validation, an impossible bench request), 2 for trace and file problems,
and 3 only under --fail-on-violation when a final robustness value is
negative.  Diagnostics go to standard error; results go to standard
output or to the files named by --out and --plot.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from .bench import DEFAULT_BOUNDS, format_table, run_bench
from .core import (
    Duration,
    ExtReal,
    NotDivisibleError,
    ParseError,
    SpecError,
    UnboundedFutureError,
    ValidationError,
)
from .dense import DenseMonitor
from .discrete import DiscreteMonitor
from .parser import format_formula, parse_spec
from .pastify import (
    horizon,
    pastify_formula,
    rewrite_root,
    scale_to_samples,
    scale_to_seconds,
)
from .traceio import read_dense_batches, read_discrete_trace, write_series

__all__ = ["build_arg_parser", "main"]

_SPEC_SIDE = (ParseError, ValidationError, UnboundedFutureError,
              NotDivisibleError)


def _fmt(value) -> str:
    v = value.as_float() if isinstance(value, ExtReal) else float(value)
    return repr(v)


def _read_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        print(f"stlmon: cannot read spec: {exc}", file=sys.stderr)
        return None


def _warmup_cut(reports) -> float:
    cut = 0.0
    for rep in reports:
        cut = max(cut, float(rep.horizon + (rep.past_depth or 0)))
    return cut


def cmd_eval(args) -> int:
    text = _read_spec(args.spec)
    if text is None:
        return 1
    model = parse_spec(text)
    if args.dense:
        monitor = DenseMonitor(model, args.semantics)
        series = monitor.dense_update(read_dense_batches(args.trace))
        if args.skip_warmup:
            cut = _warmup_cut(
                horizon(rewrite_root(scale_to_seconds(body)), discrete=False)
                for _name, body, _pos in model.assignments)
            series = {name: [(t, v) for t, v in points if t >= cut]
                      for name, points in series.items()}
    else:
        period = Duration.of(args.period, args.unit)
        monitor = DiscreteMonitor(model, period, args.semantics)
        trace = read_discrete_trace(args.trace, period)
        tick = float(period.to_seconds())
        series = {name: [] for name, _body, _pos in model.assignments}
        for k in range(trace.length):
            valuation = {v: trace.values[v][k]
                         for v in monitor.required_variables
                         if v in trace.values}
            for name, value in monitor.update(k, valuation).items():
                series[name].append((k * tick, value))
        if args.skip_warmup:
            cut = int(_warmup_cut(monitor.reports.values()))
            series = {name: points[cut:]
                      for name, points in series.items()}
    if args.out:
        write_series(args.out, series)
    if args.plot:
        from .plots import plot_series
        plot_series(args.plot, series)
    code = 0
    for name, points in series.items():
        if not points:
            print(f"{name} undetermined")
            continue
        final = points[-1][1]
        print(f"{name} {_fmt(final)}")
        if args.fail_on_violation and final.as_float() < 0:
            code = 3
    return code


def cmd_pastify(args) -> int:
    text = _read_spec(args.spec)
    if text is None:
        return 1
    model = parse_spec(text)
    for name, body, _pos in model.assignments:
        if args.dense:
            rewritten = rewrite_root(scale_to_seconds(body))
            past = pastify_formula(rewritten, discrete=False)
            hrep = horizon(rewritten, discrete=False)
            lrep = horizon(past, discrete=False)
        else:
            period = Duration.of(args.period, args.unit)
            rewritten = rewrite_root(scale_to_samples(body, period))
            past = pastify_formula(rewritten)
            hrep = horizon(rewritten)
            lrep = horizon(past)
        depth = "inf" if lrep.past_depth is None else str(lrep.past_depth)
        print(f"{name} = {format_formula(past)}")
        print(f"H={hrep.horizon} L={depth}")
    return 0


def cmd_bench(args) -> int:
    bounds = args.k if args.k else list(DEFAULT_BOUNDS)
    n_updates = args.samples
    if n_updates is None:
        n_updates = max(bounds) + 1000
    try:
        results = run_bench(bounds, n_updates,
                            seed=args.seed, pattern=args.pattern)
    except ValueError as exc:
        print(f"stlmon: {exc}", file=sys.stderr)
        return 1
    if args.json:
        for r in results:
            print(json.dumps(asdict(r)))
    else:
        print(format_table(results))
    if args.plot:
        from .plots import plot_bench
        plot_bench(args.plot, results)
    return 0


def _spec_options(p) -> None:
    p.add_argument("--stl", "--spec", dest="spec", required=True,
                   metavar="PATH", help="specification file")
    p.add_argument("--period", default="1", metavar="N",
                   help="sample period magnitude (discrete time only)")
    p.add_argument("--unit", default="s", choices=("s", "ms", "us", "ns"),
                   help="period unit")
    p.add_argument("--dense", action="store_true",
                   help="dense-time interpretation over event traces")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stlmon",
        description="online robustness monitoring for temporal logic specs")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser(
        "eval", help="replay a trace and write the robustness series")
    _spec_options(ev)
    ev.add_argument("--trace", required=True, metavar="PATH",
                    help="CSV trace file")
    ev.add_argument("--semantics", default="standard",
                    choices=("standard", "output-robustness",
                             "input-vacuity"))
    ev.add_argument("--skip-warmup", action="store_true",
                    help="drop rows before a full window has been seen"
                         " (with several formulas the longest warm-up"
                         " wins)")
    ev.add_argument("--out", metavar="PATH",
                    help="write the series as CSV")
    ev.add_argument("--plot", metavar="PATH",
                    help="render the series to an image file")
    ev.add_argument("--fail-on-violation", action="store_true",
                    help="exit 3 when a final robustness value is"
                         " negative")
    ev.set_defaults(run=cmd_eval)

    pa = sub.add_parser(
        "pastify", help="print past-only forms with their depths")
    _spec_options(pa)
    pa.set_defaults(run=cmd_pastify)

    be = sub.add_parser(
        "bench", help="time per-update cost at growing window bounds")
    be.add_argument("--k", action="append", type=int, metavar="N",
                    help="window bound in samples; repeatable"
                         " (default: 100 through 1M)")
    be.add_argument("--samples", type=int, metavar="N",
                    help="updates per run, warm-up included"
                         " (default: max k + 1000)")
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--pattern", default="random",
                    choices=("random", "increasing"))
    be.add_argument("--json", action="store_true",
                    help="one JSON object per bound instead of a table")
    be.add_argument("--plot", metavar="PATH",
                    help="render the timings to an image file")
    be.set_defaults(run=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.run(args)
    except _SPEC_SIDE as exc:
        print(f"stlmon: {exc}", file=sys.stderr)
        return 1
    except (SpecError, OSError) as exc:
        print(f"stlmon: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
