from __future__ import annotations

import shutil
import subprocess
import sys

import pytest

from conftest import FIXTURES, fixture_text
from essence.cli import UNSUPPORTED, main


@pytest.fixture
def work(tmp_path, monkeypatch):
    for p in FIXTURES.iterdir():
        if not p.name.endswith(".solution"):
            shutil.copy(p, tmp_path / p.name)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_solve_writes_solution_beside_model(work, capsys):
    assert main(["solve", "sm3.essence"]) == 0
    assert (work / "sm3.solution").read_text().split() == fixture_text("sm3.solution").split()
    assert (work / "conjure-output" / "sm3.solution").exists()
    assert "1 solution found" in capsys.readouterr().out


def test_solve_with_param_naming(work):
    assert main(["solve", "gc1.essence", "path-4.param"]) == 0
    text = (work / "gc1-path-4.solution").read_text()
    assert text.split() == fixture_text("gc1-path-4.solution").split()


def test_numbered_solutions(work, capsys):
    assert main(["solve", "--number-of-solutions=all", "-o", "out", "gce2.essence"]) == 0
    files = sorted(p.name for p in (work / "out").iterdir())
    assert files == [f"gce2-{i:06d}.solution" for i in range(1, 39)]
    assert "38 solutions found" in capsys.readouterr().out


def test_no_copy_and_count(work):
    assert main(["solve", "--no-copy-solutions", "--number-of-solutions", "3", "sm1.essence"]) == 0
    assert not list(work.glob("sm1*.solution"))
    assert len(list((work / "conjure-output").glob("sm1-*.solution"))) == 3


def test_solve_is_byte_identical_twice(work):
    main(["solve", "--number-of-solutions=all", "-o", "a", "gc4.essence", "disconnected-4.param"])
    main(["solve", "--number-of-solutions=all", "-o", "b", "gc4.essence", "disconnected-4.param"])
    a = {p.name: p.read_bytes() for p in (work / "a").iterdir()}
    b = {p.name: p.read_bytes() for p in (work / "b").iterdir()}
    assert a == b and a


def test_zero_solutions_is_success(work, capsys):
    (work / "unsat.essence").write_text("find x : int(0..3) such that x > 5\n")
    assert main(["solve", "unsat.essence"]) == 0
    assert "0 solutions found" in capsys.readouterr().out


def test_validate_solutions_flag(work):
    assert main(["solve", "--validate-solutions", "sm3.essence"]) == 0


def test_solve_errors(work, capsys):
    assert main(["solve", "gc1.essence"]) == 1  # givens without a parameter file
    assert main(["solve", "missing.essence"]) == 1
    assert main(["solve", "--number-of-solutions=0", "sm3.essence"]) == 1
    (work / "bad.essence").write_text("find x : \n")
    assert main(["solve", "bad.essence"]) == 1
    err = capsys.readouterr().err
    assert "error" in err


def test_limit_time(work, capsys):
    (work / "slow.essence").write_text(
        "find x : matrix indexed by [int(1..12)] of int(0..9) such that sum(x) < 0\n")
    assert main(["solve", "--limit-time", "0.5", "slow.essence"]) == 1
    assert "time limit" in capsys.readouterr().err


def test_type_check(work, capsys):
    assert main(["type-check", "sm3.essence"]) == 0
    assert main(["type-check", "sm3-literal.essence"]) == 1
    (work / "boolobj.essence").write_text("find a : bool\nminimising a\n")
    assert main(["type-check", "boolobj.essence"]) == 1
    assert main(["type-check", "nope.essence"]) == 1
    assert "toInt" in capsys.readouterr().err


def test_pretty(work, capsys):
    assert main(["pretty", "sm1.essence"]) == 0
    out = capsys.readouterr().out
    from essence.parser import parse_model
    assert parse_model(out) == parse_model(fixture_text("sm1.essence"))
    (work / "dead.essence").write_text("letting z be 3\nfind x : bool\nsuch that x\n")
    assert main(["pretty", "--remove-unused", "dead.essence"]) == 0
    assert "letting z" not in capsys.readouterr().out
    assert main(["pretty", "--line-width=40", "gc3.essence"]) == 0
    assert all(len(l) <= 40 for l in capsys.readouterr().out.splitlines())
    assert main(["pretty", "--normalise-quantified", "gc4.essence"]) == 0
    assert "q1" in capsys.readouterr().out


def test_diff(work, capsys):
    assert main(["diff", "sm3.essence", "sm3.essence"]) == 0
    assert capsys.readouterr().out == ""
    assert main(["diff", "sm1.essence", "sm2.essence"]) == 1
    out = capsys.readouterr().out
    assert "injective" in out and "find f" in out
    shutil.copy(FIXTURES / "sm3.solution", work / "a.solution")
    blocks = (work / "a.solution").read_text().split("letting ")[1:]
    (work / "b.solution").write_text("".join("letting " + b for b in reversed(blocks)))
    assert main(["diff", "a.solution", "b.solution"]) == 0


def test_validate_solution(work, capsys):
    shutil.copy(FIXTURES / "sm3.solution", work)
    shutil.copy(FIXTURES / "sm1.solution", work)
    shutil.copy(FIXTURES / "gc1-path-4.solution", work)
    assert main(["validate-solution", "--essence", "sm3.essence", "--solution", "sm3.solution"]) == 0
    assert main(["validate-solution", "--essence", "sm3.essence", "--solution", "sm1.solution"]) == 1
    assert "f(M) > 0" in capsys.readouterr().out
    assert main(["validate-solution", "--essence=gc1.essence", "--param=path-4.param",
                 "--solution=gc1-path-4.solution"]) == 0
    assert main(["validate-solution", "--essence", "sm3.essence"]) == 1


@pytest.mark.parametrize("cmd", ["solve", "type-check", "pretty", "diff", "validate-solution"])
def test_help(cmd, capsys):
    assert main([cmd, "--help"]) == 0
    assert "usage" in capsys.readouterr().out


@pytest.mark.parametrize("cmd", UNSUPPORTED[:4])
def test_unsupported(cmd, capsys):
    assert main([cmd, "x.essence"]) == 1
    assert "not supported" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert main([]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["--version"]) == 0


def test_internal_errors_exit_2(work, monkeypatch, capsys):
    import essence.cli as cli

    def boom(*a, **k):
        raise ZeroDivisionError("bug")
    monkeypatch.setattr(cli, "check_model", boom)
    assert main(["type-check", "sm3.essence"]) == 2
    assert "internal error" in capsys.readouterr().err


def test_console_script_entry(work):
    r = subprocess.run([sys.executable, "-m", "essence.cli", "type-check", "sm3.essence"],
                       capture_output=True, text=True)
    assert r.returncode == 0
