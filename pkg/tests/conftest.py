from __future__ import annotations

import sys
from pathlib import Path

import pytest

from essence.evaluator import evaluate
from essence.parser import parse_expression, parse_model, parse_param
from essence.solver import instantiate

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def load_instance(model: str, param: str | None = None):
    m = parse_model(fixture_text(model))
    params = parse_param(fixture_text(param)) if param else []
    return instantiate(m, params)


def ev(expr: str, prelude: str = ""):
    """Evaluate an expression after the letting statements in ``prelude``."""
    inst = instantiate(parse_model(prelude))
    enums = {n for n in inst.env.vars if type(inst.env.vars[n]).__name__ == "EnumDef"}
    return evaluate(parse_expression(expr, enums), inst.env)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not getattr(acc, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acc.RESULTS):
        ok, title = acc.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}")
