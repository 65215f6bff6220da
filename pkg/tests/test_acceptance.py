"""End-to-end acceptance checks.

Each test covers one shipping criterion and prints a PASS or FAIL line,
so `pytest tests/test_acceptance.py -s` reads as a checklist.  Everything
asserted here is exact unless the criterion itself is a timing bound.
"""

import random
import subprocess
import sys
from fractions import Fraction

import pytest

from stlmon.core import (
    Duration,
    ExtReal,
    IoSignature,
    POS_INF,
    SemanticsMode,
)
from stlmon.bench import run_bench
from stlmon.dense import DenseMonitor
from stlmon.discrete import DiscreteMonitor
from stlmon.formula import SpecModel, used_variables
from stlmon.oracle import DiscreteTrace, offline_series, predicate_case
from stlmon.parser import parse_spec
from stlmon.pastify import horizon, pastify_formula, rewrite_root
from stlmon.cli import main as cli_main

from conftest import gen_formula, gen_io, gen_trace
from test_dense import _sampled_batches, in_seconds


class _Criterion:
    """Prints one PASS/FAIL line for the wrapped block."""

    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, _exc, _tb):
        print(f"{'FAIL' if exc_type else 'PASS'}: {self.name}")
        return False


def _stream(monitor, values, n):
    out = []
    for t in range(n):
        row = {v: values[v][t] for v in monitor.required_variables}
        out.append(monitor.update(t, row)["out"])
    return out


RG_SPEC = (
    "input req\n"
    "output gnt\n"
    "out = always((req >= 3) implies (eventually[0:5] (gnt >= 3)))\n"
)


def test_monitor_equals_offline_oracle():
    with _Criterion("online monitor equals the offline oracle on 1000"
                    " randomized cases, exactly"):
        rng = random.Random(101)
        variables = ("a", "b", "sig.x")
        modes = list(SemanticsMode)
        for i in range(1000):
            f = gen_formula(rng, depth=4, variables=variables, bound_max=8)
            io = gen_io(rng, used_variables(f))
            mode = modes[i % len(modes)]
            n = rng.randint(1, 64)
            values = gen_trace(rng, variables, n)
            trace = DiscreteTrace(values)
            model = SpecModel(io, [("out", f, None)], [])
            monitor = DiscreteMonitor(model, mode=mode)
            got = _stream(monitor, values, n)

            pastified = pastify_formula(rewrite_root(f))
            assert got == offline_series(pastified, trace, mode, io), i

            rep = horizon(f)
            if rep.past_depth is None:
                continue
            original = offline_series(f, trace, mode, io)
            for t in range(rep.past_depth, n - rep.horizon):
                assert original[t] == got[t + rep.horizon], (i, t)


def test_past_rewrite_shifts_by_the_horizon():
    with _Criterion("past-only rewrite reproduces the original series"
                    " shifted by its horizon on 500 randomized formulas"):
        rng = random.Random(102)
        variables = ("a", "b", "c")
        for i in range(500):
            f = gen_formula(rng, depth=3, variables=variables, bound_max=4,
                            bounded_past=True)
            rep = horizon(f)
            n = rep.past_depth + rep.horizon + 16
            trace = DiscreteTrace(gen_trace(rng, variables, n))
            original = offline_series(f, trace)
            shifted = offline_series(pastify_formula(f), trace)
            for t in range(rep.past_depth, n - rep.horizon):
                assert original[t] == shifted[t + rep.horizon], (i, t)


def test_request_grant_fixture():
    with _Criterion("request-grant fixture: standard -2,"
                    " output-robustness -3; with no request the modes"
                    " split into +inf versus finite positive"):
        model = parse_spec(RG_SPEC)
        served = {"req": [0.0] * 10, "gnt": [0.0] * 10}
        served["req"][2] = 5.0
        finals = {}
        for mode in ("standard", "output-robustness"):
            monitor = DiscreteMonitor(model, mode=mode)
            finals[mode] = _stream(monitor, served, 10)[-1]
        assert finals["standard"] == ExtReal(-2.0)
        assert finals["output-robustness"] == ExtReal(-3.0)

        quiet = {"req": [0.0] * 10, "gnt": [0.0] * 10}
        monitor = DiscreteMonitor(model, mode="output-robustness")
        assert _stream(monitor, quiet, 10)[-1] == POS_INF
        monitor = DiscreteMonitor(model, mode="input-vacuity")
        vacuity = _stream(monitor, quiet, 10)[-1]
        assert vacuity.is_finite and vacuity.as_float() > 0
        assert vacuity == ExtReal(3.0)


def test_interface_aware_predicate_cases():
    with _Criterion("interface-aware predicate handling: 3 modes times 3"
                    " variable sets, each lands in the derived case"):
        standard = SemanticsMode.STANDARD
        out_rob = SemanticsMode.OUTPUT_ROBUSTNESS
        vacuity = SemanticsMode.INPUT_VACUITY
        table = {
            (standard, frozenset({"input"})): "finite",
            (standard, frozenset({"output"})): "finite",
            (standard, frozenset({"input", "output"})): "finite",
            (out_rob, frozenset({"input"})): "pole",
            (out_rob, frozenset({"output"})): "finite",
            (out_rob, frozenset({"input", "output"})): "finite",
            (vacuity, frozenset({"input"})): "finite",
            (vacuity, frozenset({"output"})): "zero",
            (vacuity, frozenset({"input", "output"})): "zero",
        }
        for (mode, kinds), want in table.items():
            assert predicate_case(kinds, mode) == want, (mode, kinds)

        preds = {
            frozenset({"input"}): ("x >= 3", 2.0),
            frozenset({"output"}): ("y >= 3", -2.0),
            frozenset({"input", "output"}): ("x + y >= 3", 3.0),
        }
        for (mode, kinds), want in table.items():
            body, margin = preds[kinds]
            model = parse_spec(f"input x\noutput y\nout = {body}\n")
            monitor = DiscreteMonitor(model, mode=mode)
            got = monitor.update(0, {"x": 5.0, "y": 1.0})["out"]
            if want == "finite":
                assert got == ExtReal(margin), (mode, kinds)
            elif want == "zero":
                assert got == ExtReal(0.0), (mode, kinds)
            else:
                expected_pole = POS_INF if margin > 0 else -POS_INF
                assert got == expected_pole, (mode, kinds)


def test_discrete_dense_agreement():
    with _Criterion("discrete and dense interpretations agree at sample"
                    " times on 200 randomized aligned specs, exactly"):
        rng = random.Random(103)
        variables = ("a", "b", "sig.x")
        modes = list(SemanticsMode)
        periods = (Fraction(1), Fraction(1, 2), Fraction(1, 4))
        for i in range(200):
            period = rng.choice(periods)
            f = in_seconds(
                gen_formula(rng, depth=3, variables=variables, bound_max=3,
                            dense=True),
                period)
            io = gen_io(rng, used_variables(f))
            mode = modes[i % len(modes)]
            n = rng.randint(1, 24)
            trace = gen_trace(rng, sorted(used_variables(f)) or ["a"], n)

            model = SpecModel(io, [("out", f, None)], [])
            discrete = DiscreteMonitor(
                model, period=Duration(period, "s"), mode=mode)
            expected = []
            for k in range(n):
                row = {v: trace[v][k] for v in discrete.required_variables}
                expected.append(discrete.update(k, row)["out"])

            dense = DenseMonitor(model, mode=mode)
            segments = []
            p = float(period)
            for batch in _sampled_batches(rng, trace, p):
                batch = [(v, ev) for v, ev in batch
                         if v in dense.required_variables]
                segments += dense.dense_update(batch)["out"]

            assert segments, f"case {i}: no dense output"
            starts = [t for t, _ in segments]
            for k in range(n):
                idx = max(j for j, t in enumerate(starts) if t <= k * p)
                assert segments[idx][1] == expected[k], (i, k)


def test_update_time_is_flat_in_the_window_bound():
    with _Criterion("per-update mean at k=1000000 is at most 5x the mean"
                    " at k=100 and at most 0.046 s"):
        (small,) = run_bench([100], 101_000, seed=7)
        (large,) = run_bench([1_000_000], 1_005_000, seed=7)
        assert large.mean <= 5 * small.mean, (small.mean, large.mean)
        assert large.mean <= 0.046, large.mean


def test_state_size_is_constant_after_construction():
    with _Criterion("monitor cell count never moves across updates and"
                    " live wedge length stays within its window, on 100"
                    " randomized specs"):
        rng = random.Random(104)
        variables = ("a", "b")
        for _ in range(100):
            f = gen_formula(rng, depth=3, variables=variables, bound_max=4)
            model = SpecModel(IoSignature(), [("out", f, None)], [])
            monitor = DiscreteMonitor(model)
            rep = monitor.reports["out"]
            span = rep.horizon + (rep.past_depth or 0)
            sizes = set()
            for t in range(10 * max(1, span) + 1):
                monitor.update(t, {name: rng.uniform(-9.0, 9.0)
                                   for name in monitor.required_variables})
                if t >= 2 * span:
                    sizes.add(monitor.state_cells())
            assert len(sizes) == 1
            for _name, states in monitor._programs:
                for state, _kids in states:
                    for wedge in state.wedges:
                        assert wedge.max_len <= wedge.width


def test_cli_golden_output_and_exit_codes(tmp_path, capsys):
    with _Criterion("command line: byte-identical CSV across two runs;"
                    " exit codes 0, 1 and 2 observed"):
        spec = tmp_path / "rg.stl"
        spec.write_text(RG_SPEC)
        rows = ["time,req,gnt"]
        for k in range(10):
            rows.append(f"{k},{5 if k == 2 else 0},0")
        trace = tmp_path / "rg.csv"
        trace.write_text("\n".join(rows) + "\n")

        outputs = []
        for name in ("first.csv", "second.csv"):
            out = tmp_path / name
            code = cli_main(["eval", "--stl", str(spec), "--trace",
                             str(trace), "--period", "1", "--unit", "s",
                             "--out", str(out)])
            assert code == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        assert b"7.0,-2.0" in outputs[0]

        bad = tmp_path / "bad.stl"
        bad.write_text("out = (((\n")
        assert cli_main(["pastify", "--stl", str(bad)]) == 1
        assert cli_main(["eval", "--stl", str(spec), "--trace",
                         str(tmp_path / "absent.csv")]) == 2
        capsys.readouterr()


def test_bindings_match_the_cli(tmp_path):
    bindings = pytest.importorskip(
        "stlmon_bindings",
        reason="bindings package not installed in this environment")
    with _Criterion("bindings reproduce the command line values on the"
                    " request-grant fixture and enforce lifecycle order"):
        spec_path = tmp_path / "rg.stl"
        spec_path.write_text(RG_SPEC)
        rows = ["time,req,gnt"]
        for k in range(10):
            rows.append(f"{k},{5 if k == 2 else 0},0")
        trace_path = tmp_path / "rg.csv"
        trace_path.write_text("\n".join(rows) + "\n")
        out = tmp_path / "cli.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "stlmon", "eval", "--stl",
             str(spec_path), "--trace", str(trace_path), "--period", "1",
             "--unit", "s", "--semantics", "output-robustness",
             "--out", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        cli_values = [line.split(",")[1] for line in
                      out.read_text().splitlines()[1:]]

        spec = bindings.DiscreteSpecification()
        spec.set_semantics("output-robustness")
        spec.parse(RG_SPEC)
        got = []
        for k in range(10):
            req = 5.0 if k == 2 else 0.0
            got.append(spec.update(k, [("req", req), ("gnt", 0.0)]))
        assert [repr(v) for v in got] == cli_values

        late = bindings.DiscreteSpecification()
        with pytest.raises(bindings.LifecycleError):
            late.update(0, [("req", 0.0)])
        late.parse("out = a >= 0\n")
        with pytest.raises(bindings.LifecycleError):
            late.declare_var("b", "input")
