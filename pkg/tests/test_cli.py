"""End-to-end command-line interface behaviour and exit codes."""

import json

import pytest

from chainplan import cli

CUBIC_FLAGS = ["--n", "3", "--x0=-2,0.5,1", "--xf", "2,0,0",
               "--umin=-1", "--umax", "1"]


def _run(argv):
    return cli.main(argv)


def test_plan_document_worked_example(tmp_path, capsys):
    out = tmp_path / "plan.json"
    assert _run(["plan", *CUBIC_FLAGS, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["T"] == pytest.approx(4.1087, abs=5e-4)
    assert doc["profile"] == "000"
    assert doc["problem"]["x0"] == [-2.0, 0.5, 1.0]
    assert doc["warnings"] == []


def test_plan_zero_length(tmp_path):
    out = tmp_path / "plan.json"
    assert _run(["plan", "--n", "2", "--x0", "1,0", "--xf", "1,0",
                 "--umin=-1", "--umax", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["T"] == 0.0


def test_plan_then_check_roundtrip(tmp_path):
    out = tmp_path / "plan.json"
    assert _run(["plan", *CUBIC_FLAGS, "--out", str(out)]) == 0
    assert _run(["check", "--plan", str(out)]) == 0


def test_check_flags_tampered_times(tmp_path, capsys):
    out = tmp_path / "plan.json"
    _run(["plan", *CUBIC_FLAGS, "--out", str(out)])
    doc = json.loads(out.read_text())
    doc["times"] = [t + 1e-3 if i == 0 else t
                    for i, t in enumerate(doc["times"])]
    out.write_text(json.dumps(doc))
    assert _run(["check", "--plan", str(out)]) == cli.EXIT_CHECK_FAILURE
    assert "FAIL" in capsys.readouterr().out


def test_sample_worked_example(tmp_path, capsys):
    out = tmp_path / "plan.json"
    _run(["plan", *CUBIC_FLAGS, "--out", str(out)])
    assert _run(["sample", "--plan", str(out), "--count", "4"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "t,x1,x2,x3,u"
    assert len(lines) >= 6
    first = [float(v) for v in lines[1].split(",")]
    assert first[:4] == pytest.approx([0.0, -2.0, 0.5, 1.0])


def test_sample_trapezoid_cruise_row(tmp_path, capsys):
    out = tmp_path / "plan.json"
    _run(["plan", "--n", "2", "--x0", "0,0", "--xf", "4,0", "--umin=-1",
          "--umax", "1", "--xmin=-10", "--xmax", "1", "--out", str(out)])
    assert _run(["sample", "--plan", str(out), "--dt", "0.5"]) == 0
    rows = [[float(v) for v in line.split(",")]
            for line in capsys.readouterr().out.strip().splitlines()[1:]]
    mid = next(r for r in rows if r[0] == 2.5)
    assert mid == pytest.approx([2.5, 2.0, 1.0, 0.0])


def test_sample_zero_duration_single_row(tmp_path, capsys):
    out = tmp_path / "plan.json"
    _run(["plan", "--n", "2", "--x0", "1,0", "--xf", "1,0",
          "--umin=-1", "--umax", "1", "--out", str(out)])
    assert _run(["sample", "--plan", str(out)]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 2  # header + row


def test_problem_file_wins_over_flags(tmp_path, capsys):
    problem = tmp_path / "problem.txt"
    problem.write_text(
        "# worked example\nn = 3\nx0 = -2,0.5,1\nxf = 2,0,0\n"
        "umin = -1\numax = 1\n")
    out = tmp_path / "plan.json"
    assert _run(["plan", "--problem", str(problem), "--umax", "2",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["problem"]["umax"] == 1.0
    assert "overrides" in capsys.readouterr().err


def test_check_cross_checks_problem_file(tmp_path):
    problem = tmp_path / "problem.txt"
    problem.write_text("n=3\nx0=-2,0.5,1\nxf=2,0,0\numin=-1\numax=1\n")
    out = tmp_path / "plan.json"
    _run(["plan", "--problem", str(problem), "--out", str(out)])
    assert _run(["check", "--plan", str(out), "--problem", str(problem)]) == 0
    other = tmp_path / "other.txt"
    other.write_text("n=3\nx0=-2,0.5,1\nxf=3,0,0\numin=-1\numax=1\n")
    assert _run(["check", "--plan", str(out),
                 "--problem", str(other)]) == cli.EXIT_CHECK_FAILURE


def test_usage_errors_exit_one(tmp_path):
    assert _run(["plan", "--n", "2"]) == cli.EXIT_USAGE  # missing fields
    assert _run(["sample", "--plan", str(tmp_path / "missing.json")]) \
        == cli.EXIT_USAGE
    bad = tmp_path / "bad.txt"
    bad.write_text("nonsense line\n")
    assert _run(["plan", "--problem", str(bad)]) == cli.EXIT_USAGE


def test_planning_failure_exit_two(tmp_path):
    # a bundle stripped to the cruise-only profile cannot plan a problem
    # whose optimum needs no cruise and whose bounds are infinite
    import importlib.resources as resources
    doc = json.loads(resources.files("chainplan.data")
                     .joinpath("n2.json").read_text())
    doc["profiles"] = [p for p in doc["profiles"] if p["bits"] == "1"]
    stripped = tmp_path / "stripped.json"
    stripped.write_text(json.dumps(doc))
    code = _run(["plan", "--n", "2", "--x0", "0,0", "--xf", "4,0",
                 "--umin=-1", "--umax", "1", "--bundle", str(stripped)])
    assert code == cli.EXIT_PLAN_FAILURE


def test_plan_documents_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    _run(["plan", *CUBIC_FLAGS, "--out", str(a)])
    _run(["plan", *CUBIC_FLAGS, "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_bench_runs_and_reports(capsys):
    assert _run(["bench", "--n", "2", "--count", "50", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "failures: 0" in out
    assert "median_ms:" in out


def test_bench_zero_instances(capsys):
    assert _run(["bench", "--n", "3", "--count", "0"]) == 0


def test_bundle_verify_and_inspect(capsys, tmp_path):
    assert _run(["bundle", "verify", "--n", "3"]) == 0
    assert "8 profiles" in capsys.readouterr().out
    assert _run(["bundle", "inspect", "--n", "3"]) == 0
    assert "t7:deg4" in capsys.readouterr().out
    broken = tmp_path / "broken.json"
    broken.write_text('{"format_version": 99}')
    assert _run(["bundle", "verify", str(broken)]) == cli.EXIT_CHECK_FAILURE


def test_report_writes_csv_and_figures(tmp_path):
    out_dir = tmp_path / "report"
    assert _run(["report", *CUBIC_FLAGS, "--out-dir", str(out_dir),
                 "--count", "50"]) == 0
    assert (out_dir / "plan.json").exists()
    csv_text = (out_dir / "trajectory.csv").read_text()
    assert csv_text.startswith("t,x1,x2,x3,u")
    for figure in ("states.png", "input.png"):
        data = (out_dir / figure).read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n"


def test_warning_on_boundary_infeasible(tmp_path, capsys):
    out = tmp_path / "plan.json"
    code = _run(["plan", "--n", "3", "--x0", "0,1,0.8", "--xf", "4,0,0",
                 "--umin=-1", "--umax", "1", "--xmin=-5,-5", "--xmax", "1,5",
                 "--out", str(out)])
    assert code == 0
    assert "best-effort" in capsys.readouterr().err
    doc = json.loads(out.read_text())
    assert doc["bound_violation"] > 0.0
    assert doc["warnings"]
