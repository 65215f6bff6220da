"""Command-line behavior: golden outputs and exit codes."""

import json
import subprocess
import sys

import pytest

from stlmon.cli import main

RG_SPEC = (
    "input req\n"
    "output gnt\n"
    "out = always((req >= 3) implies (eventually[0:5] (gnt >= 3)))\n"
)

RG_SPEC_SECONDS = RG_SPEC.replace("[0:5]", "[0s:5s]")

RG_GOLDEN = (
    "time,out\n"
    "0.0,inf\n"
    "1.0,inf\n"
    "2.0,inf\n"
    "3.0,inf\n"
    "4.0,inf\n"
    "5.0,3.0\n"
    "6.0,3.0\n"
    "7.0,-2.0\n"
    "8.0,-2.0\n"
    "9.0,-2.0\n"
)

RG_GOLDEN_DENSE = (
    "time,out\n"
    "0.0,inf\n"
    "5.0,3.0\n"
    "7.0,-2.0\n"
)


def rg_files(tmp_path, spec=RG_SPEC):
    spec_path = tmp_path / "rg.stl"
    spec_path.write_text(spec)
    rows = ["time,req,gnt"]
    for k in range(10):
        rows.append(f"{k},{5 if k == 2 else 0},0")
    trace_path = tmp_path / "rg.csv"
    trace_path.write_text("\n".join(rows) + "\n")
    return str(spec_path), str(trace_path)


def eval_args(spec, trace, *extra):
    return ["eval", "--stl", spec, "--trace", trace,
            "--period", "1", "--unit", "s", *extra]


class TestEval:
    def test_golden_csv_and_final_value(self, tmp_path, capsys):
        spec, trace = rg_files(tmp_path)
        out = tmp_path / "series.csv"
        assert main(eval_args(spec, trace, "--out", str(out))) == 0
        assert capsys.readouterr().out == "out -2.0\n"
        assert out.read_bytes() == RG_GOLDEN.encode()

    def test_byte_identical_across_runs(self, tmp_path, capsys):
        spec, trace = rg_files(tmp_path)
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        main(eval_args(spec, trace, "--out", str(first)))
        main(eval_args(spec, trace, "--out", str(second)))
        capsys.readouterr()
        assert first.read_bytes() == second.read_bytes()

    def test_output_robustness_final(self, tmp_path, capsys):
        spec, trace = rg_files(tmp_path)
        code = main(eval_args(spec, trace,
                              "--semantics", "output-robustness"))
        assert code == 0
        assert capsys.readouterr().out == "out -3.0\n"

    def test_skip_warmup_drops_the_settling_prefix(self, tmp_path, capsys):
        spec, trace = rg_files(tmp_path)
        out = tmp_path / "series.csv"
        main(eval_args(spec, trace, "--skip-warmup", "--out", str(out)))
        capsys.readouterr()
        lines = out.read_text().splitlines()
        assert lines[0] == "time,out"
        assert lines[1] == "5.0,3.0"
        assert len(lines) == 6

    def test_dense_golden(self, tmp_path, capsys):
        spec, trace = rg_files(tmp_path, RG_SPEC_SECONDS)
        out = tmp_path / "series.csv"
        code = main(["eval", "--dense", "--stl", spec, "--trace", trace,
                     "--out", str(out)])
        assert code == 0
        assert capsys.readouterr().out == "out -2.0\n"
        assert out.read_bytes() == RG_GOLDEN_DENSE.encode()

    def test_dense_skip_warmup(self, tmp_path, capsys):
        spec, trace = rg_files(tmp_path, RG_SPEC_SECONDS)
        out = tmp_path / "series.csv"
        main(["eval", "--dense", "--stl", spec, "--trace", trace,
              "--skip-warmup", "--out", str(out)])
        capsys.readouterr()
        assert out.read_text() == "time,out\n5.0,3.0\n7.0,-2.0\n"

    def test_violation_is_data_by_default(self, tmp_path, capsys):
        spec, trace = rg_files(tmp_path)
        assert main(eval_args(spec, trace)) == 0
        capsys.readouterr()

    def test_fail_on_violation_flips_to_3(self, tmp_path, capsys):
        spec, trace = rg_files(tmp_path)
        assert main(eval_args(spec, trace, "--fail-on-violation")) == 3
        capsys.readouterr()

    def test_missing_trace_exits_2(self, tmp_path, capsys):
        spec, _trace = rg_files(tmp_path)
        code = main(eval_args(spec, str(tmp_path / "absent.csv")))
        assert code == 2
        assert capsys.readouterr().err != ""

    def test_off_clock_trace_exits_2(self, tmp_path, capsys):
        spec_path = tmp_path / "p.stl"
        spec_path.write_text("out = a >= 0\n")
        trace_path = tmp_path / "t.csv"
        trace_path.write_text("time,a\n0,1\n7,2\n")
        code = main(eval_args(str(spec_path), str(trace_path)))
        assert code == 2
        capsys.readouterr()

    def test_unbounded_until_exits_1(self, tmp_path, capsys):
        spec_path = tmp_path / "u.stl"
        spec_path.write_text("out = a until b\n")
        _spec, trace = rg_files(tmp_path)
        assert main(eval_args(str(spec_path), trace)) == 1
        assert capsys.readouterr().err != ""

    def test_plot_writes_an_image(self, tmp_path, capsys):
        spec, trace = rg_files(tmp_path)
        figure = tmp_path / "series.png"
        assert main(eval_args(spec, trace, "--plot", str(figure))) == 0
        capsys.readouterr()
        assert figure.read_bytes()[:4] == b"\x89PNG"


class TestPastify:
    def test_request_grant_past_form(self, tmp_path, capsys):
        spec, _trace = rg_files(tmp_path)
        assert main(["pastify", "--stl", spec]) == 0
        assert capsys.readouterr().out == (
            "out = historically((not delay[5] (req >= 3))"
            " or once[0:5] (gnt >= 3))\n"
            "H=5 L=inf\n"
        )

    def test_pure_predicate_is_unchanged(self, tmp_path, capsys):
        spec_path = tmp_path / "p.stl"
        spec_path.write_text("out = a >= 3\n")
        assert main(["pastify", "--stl", str(spec_path)]) == 0
        assert capsys.readouterr().out == "out = a >= 3\nH=0 L=0\n"

    def test_syntax_error_exits_1(self, tmp_path, capsys):
        spec_path = tmp_path / "bad.stl"
        spec_path.write_text("out = (((\n")
        assert main(["pastify", "--stl", str(spec_path)]) == 1
        assert "stlmon:" in capsys.readouterr().err


class TestBench:
    def test_json_one_object_per_bound(self, capsys):
        assert main(["bench", "--k", "16", "--samples", "48",
                     "--json"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 1
        row = json.loads(lines[0])
        assert row["k"] == 16 and row["n_updates"] == 48
        assert row["mean"] > 0

    def test_table_rows_in_input_order(self, capsys):
        assert main(["bench", "--k", "4", "--k", "8",
                     "--samples", "24"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 3
        assert lines[1].lstrip().startswith("4")
        assert lines[2].lstrip().startswith("8")

    def test_zero_samples_is_a_usage_error(self, capsys):
        assert main(["bench", "--k", "16", "--samples", "0"]) == 1
        assert capsys.readouterr().err != ""

    def test_plot_writes_an_image(self, tmp_path, capsys):
        figure = tmp_path / "bench.png"
        assert main(["bench", "--k", "4", "--samples", "24",
                     "--plot", str(figure)]) == 0
        capsys.readouterr()
        assert figure.read_bytes()[:4] == b"\x89PNG"


class TestModuleEntry:
    def test_golden_runs_byte_identical(self, tmp_path):
        spec, trace = rg_files(tmp_path)
        outputs = []
        for name in ("one.csv", "two.csv"):
            out = tmp_path / name
            proc = subprocess.run(
                [sys.executable, "-m", "stlmon", "eval", "--stl", spec,
                 "--trace", trace, "--period", "1", "--unit", "s",
                 "--out", str(out)],
                capture_output=True, text=True)
            assert proc.returncode == 0
            assert proc.stdout == "out -2.0\n"
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == RG_GOLDEN.encode()
