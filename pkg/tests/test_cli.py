"""Tests for the command-line frontend and its exit codes."""

import json

import pytest

from descomp.cli import (
    EXIT_BUDGET,
    EXIT_OK,
    EXIT_UNREALIZABLE,
    EXIT_USAGE,
    EXIT_VERIFICATION,
    run_cli,
)

UNREALIZABLE = """
events a u
controllable a
lts M {
  init s0;
  alphabet a;
  s0 -u-> s1;
  s1 -u-> s1;
}
lts N {
  init t0;
  t0 -u-> t0;
}
goal assume u guarantee a
"""

REALIZABLE = """
events a b
controllable a b
lts M {
  init s0;
  s0 -a-> s0;
  s0 -b-> s0;
}
goal guarantee a
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_solve_and_verify_bundle(tmp_path):
    out = tmp_path / "bundle"
    rc = run_cli(["solve", "--family", "DP", "--n", "2", "--out", str(out)])
    assert rc == EXIT_OK
    assert (out / "controllers.lts").exists()
    assert (out / "problem.lts").exists()
    manifest = json.loads((out / "bundle.json").read_text())
    assert manifest["controllers"] >= 1
    rc = run_cli(["verify", str(out / "problem.lts"), str(out / "controllers.lts")])
    assert rc == EXIT_OK


def test_solve_mono_mode(tmp_path, capsys):
    path = write(tmp_path, "p.lts", REALIZABLE)
    rc = run_cli(["solve", "--mode", "mono", path])
    assert rc == EXIT_OK
    assert "lts C0" in capsys.readouterr().out


def test_unrealizable_exit_code(tmp_path):
    path = write(tmp_path, "p.lts", UNREALIZABLE)
    assert run_cli(["solve", path]) == EXIT_UNREALIZABLE
    assert run_cli(["solve", "--mode", "mono", path]) == EXIT_UNREALIZABLE


def test_verification_failure_exit_code(tmp_path, capsys):
    path = write(tmp_path, "p.lts", REALIZABLE)
    # controller enabling only b starves the guarantee on a
    bad = write(
        tmp_path,
        "c.lts",
        "events a b\ncontrollable a b\nlts C0 {\n  init s0;\n  s0 -b-> s0;\n}\n",
    )
    rc = run_cli(["verify", path, bad])
    assert rc == EXIT_VERIFICATION
    out = capsys.readouterr().out
    assert "goal violated" in out


def test_usage_errors(tmp_path):
    assert run_cli(["solve"]) == EXIT_USAGE  # neither file nor family
    assert run_cli(["solve", str(tmp_path / "missing.lts")]) == EXIT_USAGE
    bad = write(tmp_path, "bad.lts", "events a\nlts M { init s; s -z-> s; }")
    assert run_cli(["solve", bad]) == EXIT_USAGE
    assert run_cli(["nonsense"]) == EXIT_USAGE


def test_budget_exit_code():
    rc = run_cli(["solve", "--family", "DP", "--n", "3", "--budget", "10"])
    assert rc == EXIT_BUDGET


def test_bench_rows(capsys):
    rc = run_cli(["bench", "TL", "1", "2", "--k", "1"])
    assert rc == EXIT_OK
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert {r["n"] for r in rows} == {1, 2}
    assert all("millis" in r for r in rows)


def test_export_formats(tmp_path, capsys):
    path = write(tmp_path, "p.lts", REALIZABLE)
    assert run_cli(["export", path]) == EXIT_OK
    assert "digraph" in capsys.readouterr().out
    assert run_cli(["export", path, "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["events"] == ["a", "b"]
    assert doc["goal"] == "guarantee a"
