import json

import pandas as pd
import pytest
from unittest.mock import patch
from app import cli
from app.reports import CheckReport
from tests.conftest import GOLDEN_DIR, corpus_path


@pytest.fixture(autouse=True)
def isolated_output(tmp_path, monkeypatch):
    monkeypatch.delenv('TRACE_BASE_DIR', raising=False)
    monkeypatch.delenv('TRACE_CORPUS_DIR', raising=False)
    monkeypatch.setenv('TRACE_LOG_DIR', str(tmp_path / "logs"))
    monkeypatch.setenv('TRACE_HISTORY_DIR', str(tmp_path / "history"))
    monkeypatch.setenv('TRACE_AUTO_SAVE', 'false')


def run_main(capsys, *argv):
    status = cli.main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err

# Test cases for golden outputs

@pytest.mark.parametrize("golden, argv", [
    ("running-nd.txt", ["trace", "running-nd", "--state", "x", "--depth", "6"]),
    ("running-prob.txt", ["trace", "running-prob", "--state", "x'", "--depth", "4"]),
    ("peano-cfg.txt", ["trace", "peano-cfg", "--state", "T", "--depth", "3"]),
    ("classic.txt", ["equiv", "classic", "x", "y", "--depth", "8"]),
    ("lift-trio.txt", ["trace", "lift-trio", "--exact"]),
])
def test_golden_outputs(capsys, golden, argv):
    status, out, _ = run_main(capsys, *argv)
    assert status == 0
    assert out == (GOLDEN_DIR / golden).read_text(encoding="utf-8")

def test_system_given_as_path(capsys):
    status, out, _ = run_main(capsys, "trace", str(corpus_path("running-nd")), "--state", "x", "--depth", "3")
    assert status == 0
    assert out == "x: {a, a.b}\n"

# Test cases for the other subcommands

def test_json_output(capsys):
    status, out, _ = run_main(capsys, "trace", "running-nd", "--state", "x", "--depth", "3", "--format", "json")
    assert status == 0
    assert json.loads(out) == {
        "subcommand": "trace",
        "status": 0,
        "result": {"system": "running-nd", "monad": "powerset", "depth": 3, "traces": {"x": ["a", "a.b"]}},
    }

def test_history_reads_saved_results(capsys, monkeypatch):
    monkeypatch.setenv('TRACE_AUTO_SAVE', 'true')
    run_main(capsys, "bisim", "classic")
    status, out, _ = run_main(capsys, "history")
    assert status == 0
    assert out.startswith("bisim system=classic -> status 0")
    status, out, _ = run_main(capsys, "history", "--clear", "--format", "json")
    assert json.loads(out)["result"]["results"][0]["subcommand"] == "bisim"

def test_history_when_empty(capsys):
    assert run_main(capsys, "history") == (0, "History is empty\n", "")

def test_bisim(capsys):
    status, out, _ = run_main(capsys, "bisim", "classic")
    assert status == 0
    assert out == "{x}\n{x1}\n{x2, x3, y3, y4}\n{y}\n{y1}\n{y2}\n"

def test_enumerate(capsys):
    _, out, _ = run_main(capsys, "enumerate", "running-nd", "--depth", "2")
    assert out == "eps\na\nb\n"

def test_tests(capsys):
    _, out, _ = run_main(capsys, "tests", "running-nd", "--depth", "2")
    assert out == "eps: {y}\na: {x}\nb: {y}\n"

def test_theory(capsys):
    _, out, _ = run_main(capsys, "theory", "running-nd", "--depth", "3")
    assert out == "x: {a, a.b}\ny: {eps, b, b.b}\n"

def test_omega_word(capsys):
    status, out, _ = run_main(capsys, "omega", "running-nd", "--word", "a.(b)^w")
    assert status == 0
    assert out == "x: accepts a.(b)^w\ny: rejects a.(b)^w\n"

def test_omega_candidate(capsys):
    _, out, _ = run_main(capsys, "omega", "running-nd", "--bound", "3")
    assert out == "x: {a, a.b, a.(b)^w}\ny: {eps, b, b.b, (b)^w}\n"

def test_equiv_with_testing(capsys):
    _, out, _ = run_main(capsys, "equiv", "classic", "x", "y", "--depth", "8", "--testing")
    assert out == "trace-equivalent: yes; bisimilar: no\ntesting-equivalent: yes\n"

def test_check_passes(capsys, tmp_path):
    target = tmp_path / "reports" / "check.csv"
    status, out, err = run_main(capsys, "check", "running-nd", "--depth", "3", "--samples", "5",
                                "--report-csv", str(target))
    assert status == 0
    assert out.endswith(" 0 failures\n")
    assert out.splitlines()[-1].startswith("PASS: ")
    assert err == ""
    df = pd.read_csv(target)
    assert list(df.columns) == ['suite', 'cases', 'failures', 'passed', 'counterexample']
    assert df['failures'].sum() == 0

# Test cases for exit statuses

def test_missing_system_is_usage_error(capsys):
    status, _, err = run_main(capsys, "trace")
    assert status == 2
    assert "usage" in err

def test_unknown_state(capsys):
    status, out, err = run_main(capsys, "trace", "running-nd", "--state", "q")
    assert status == 2
    assert out == ""
    assert "Error: Unknown state: q" in err

def test_check_laws_rejects_zero_samples(capsys):
    status, _, err = run_main(capsys, "check-laws", "--samples", "0")
    assert status == 2
    assert "--samples must be positive" in err

def test_rel_lifting_needs_powerset(capsys):
    status, _, err = run_main(capsys, "trace", "lift-trio", "--law", "rel-lifting")
    assert status == 2
    assert "needs a powerset system" in err

def test_failed_check_exits_one(capsys):
    report = CheckReport("monad laws")
    report.entry("associativity").record(False, "f = g")
    with patch('app.commands.run_law_suites', return_value=report):
        status, out, err = run_main(capsys, "check-laws", "--samples", "5")
    assert status == 1
    assert out == (
        "FAIL associativity (1 cases, 1 failures)\n"
        "  counterexample: f = g\n"
        "FAIL: 1 suites, 1 failures\n"
    )
    assert "Some checks failed" in err

# Test cases for cli.run

def test_run_with_config(config):
    result = cli.run("bisim", {'system': str(corpus_path("classic"))}, config)
    assert result.succeeded
    assert result.lines[0] == "{x}"

def test_run_reports_usage_errors(config):
    result = cli.run("enumerate", {'system': str(corpus_path("running-nd")), 'depth': -1}, config)
    assert result.status == 2
    assert "--depth must be non-negative" in result.error

def test_build_parser_lists_every_subcommand():
    parser = cli.build_parser()
    args = parser.parse_args(["check-laws", "--sweep"])
    assert args.command == "check-laws"
    assert args.sweep is True
    assert args.format == "plain"
