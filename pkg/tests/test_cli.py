from __future__ import annotations

import io
import json
import shutil
import subprocess
import sys

import pytest

from abplan.cli import main
from util import EXAMPLES

TAXI = str(EXAMPLES / "taxi.abp")
LOADED = str(EXAMPLES / "taxi-loaded.abp")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def ex(name):
    return str(EXAMPLES / name)


def test_plan_standard():
    code, out, _ = run("plan", TAXI, ex("taxi.p"))
    assert code == 0
    assert out.count("(:step") == 3 and ":weight 0" in out


def test_plan_no_fuel():
    code, out, _ = run("plan", TAXI, ex("taxi-nofuel.p"), "--max-assumptions", "1")
    assert code == 0 and ":weight 1" in out
    assert "(:step (:assume ((hasfuel cab38 10))) (:action (!move cab38 downtown park)))" in out
    code, out, _ = run("plan", TAXI, ex("taxi-nofuel.p"), "--max-assumptions", "0")
    assert code == 2 and "no_solution_within_bounds" in out


def test_plan_budget_exit_code():
    code, out, _ = run("plan", TAXI, ex("taxi-nofuel.p"), "--node-budget", "1")
    assert code == 3 and "budget_exhausted" in out


def test_plan_json_and_flags():
    code, out, _ = run("plan", TAXI, ex("taxi-nofuel.p"), "--format", "json", "--iterative-deepening",
                       "--widen-assumptions", "--seed", "5", "--max-depth", "10")
    d = json.loads(out)
    assert code == 0 and d["status"] == "solved" and d["conjecture"]["weight"] == 1


def test_plan_output_is_byte_identical():
    a = run("plan", LOADED, ex("three-cabs-any.p"))[1]
    b = run("plan", LOADED, ex("three-cabs-any.p"), "--seed", "99")[1]
    assert a == b


@pytest.mark.parametrize("argv", [
    ("plan", "/nonexistent.abp", ex("taxi.p")),
    ("plan", TAXI, ex("three-cabs.p")),
    ("plan", TAXI, ex("taxi.p"), "--node-budget", "0"),
    ("plan", TAXI, ex("taxi.p"), "--max-assumptions", "-1"),
    ("bench", "/nonexistent"),
    ("oracle", TAXI, ex("taxi.p"), "--depth", "99", "--weight", "1"),
])
def test_errors_exit_one(argv):
    code, _, err = run(*argv)
    assert code == 1 and err.startswith("abp ")


def test_parse_error_has_location(tmp_path):
    bad = tmp_path / "bad.abp"
    bad.write_text("(defdomain bad\n (:operator (!a ?x) :add ((p ?y))))")
    code, _, err = run("plan", str(bad), ex("taxi.p"))
    assert code == 1 and "free effect variable ?y" in err and ":2:" in err


def test_validate_round_trip(tmp_path):
    for fmt in ("sexp", "json"):
        code, out, _ = run("plan", TAXI, ex("taxi-nofuel.p"), "--format", fmt)
        f = tmp_path / f"c.{fmt}"
        f.write_text(out)
        code, out, _ = run("validate", TAXI, ex("taxi-nofuel.p"), str(f))
        assert code == 0 and ":valid true" in out


def test_validate_rejects(tmp_path):
    f = tmp_path / "pi.sexp"
    f.write_text(run("plan", TAXI, ex("taxi.p"))[1])
    code, out, _ = run("validate", TAXI, ex("taxi-nofuel.p"), str(f))
    assert code == 2 and ":missing (hasfuel cab38 10)" in out
    f.write_text("(:conjecture :weight 0")
    assert run("validate", TAXI, ex("taxi.p"), str(f))[0] == 1


def test_oracle():
    code, out, _ = run("oracle", TAXI, ex("taxi-nofuel.p"), "--depth", "6", "--weight", "2")
    assert code == 0 and ":min-weight 1" in out
    code, out, _ = run("oracle", TAXI, ex("taxi.p"), "--depth", "6", "--weight", "2", "--format", "json")
    assert json.loads(out)["min_weight"] == 0


def test_bench_monotone():
    code, out, _ = run("bench", str(EXAMPLES), "--repeat", "2", "--bounds", "0,2")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    by = {(r["instance"], r["bound"]): r for r in rows}
    names = {r["instance"] for r in rows}
    assert {"taxi", "taxi-nofuel", "three-cabs", "three-cabs-any"} <= names
    for n in names:
        assert by[(n, 0)]["expansions"] <= by[(n, 2)]["expansions"]
        assert by[(n, 2)]["milliseconds"] >= 0


def test_bench_sexp():
    code, out, _ = run("bench", str(EXAMPLES), "--repeat", "1", "--format", "sexp", "--bounds", "1")
    assert code == 0 and out.startswith("(:row :instance")


@pytest.mark.skipif(shutil.which("abp") is None, reason="console script not installed")
def test_console_script():
    p = subprocess.run(["abp", "plan", TAXI, ex("taxi.p")], capture_output=True, text=True)
    assert p.returncode == 0 and ":weight 0" in p.stdout


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "abplan", "plan", TAXI, ex("taxi-nofuel.p"),
                        "--max-assumptions", "0"], capture_output=True, text=True)
    assert p.returncode == 2
