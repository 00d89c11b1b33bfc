from __future__ import annotations

import dataclasses

import pytest

from conftest import FIXTURES, fixture_text, load_instance
from essence import ast as A
from essence.parser import parse_expression, parse_model, parse_param
from essence.printer import (PrintConfig, print_domain, print_expr, print_model,
                             print_solution, print_value)
from essence.solver import SolveConfig, solution_values, solve
from essence.values import FunctionV, MatrixV, SetV, vkey

MODELS = sorted(p.name for p in FIXTURES.glob("*.essence"))
LETTINGS = sorted(p.name for p in FIXTURES.iterdir() if not p.name.endswith(".essence"))


@pytest.mark.parametrize("width", [20, 40, 80, 120])
@pytest.mark.parametrize("name", MODELS)
def test_model_roundtrip(name, width):
    m = parse_model(fixture_text(name))
    assert parse_model(print_model(m, PrintConfig(line_width=width))) == m


@pytest.mark.parametrize("width", [20, 40, 120])
@pytest.mark.parametrize("name", LETTINGS)
def test_letting_file_roundtrip(name, width):
    ps = parse_param(fixture_text(name))
    text = print_model(A.Model(tuple(ps)), PrintConfig(line_width=width))
    assert parse_param(text) == ps


@pytest.mark.parametrize("width", [40, 80, 120])
@pytest.mark.parametrize("name", MODELS)
def test_line_width_respected(name, width):
    text = print_model(parse_model(fixture_text(name)), PrintConfig(line_width=width))
    assert all(len(line) <= width for line in text.splitlines())


def test_line_width_minimum():
    with pytest.raises(ValueError):
        PrintConfig(line_width=10)


def test_remove_unused():
    m = parse_model("letting z be 3\nletting y be 4\nfind x : int(0..y) such that x > 1")
    text = print_model(m, PrintConfig(remove_unused=True))
    assert "z" not in text and "letting y be 4" in text


def test_normalise_quantified():
    m = parse_model("letting S be {1,2}\nsuch that forAll i in S . i=i")
    text = print_model(m, PrintConfig(normalise_quantified=True))
    assert "forAll q1 in S . q1 = q1" in text


def _erase_binders(e):
    """Oracle: rename every bound variable by binding position."""
    order: dict[str, str] = {}
    for n in A.walk(e):
        if isinstance(n, A.NamePattern):
            order.setdefault(n.name, f"_{len(order)}")

    def go(x):
        if isinstance(x, (A.Ref, A.NamePattern)) and x.name in order:
            return type(x)(order[x.name])
        if isinstance(x, tuple):
            return tuple(go(y) for y in x)
        if dataclasses.is_dataclass(x):
            return type(x)(*(go(getattr(x, f.name)) for f in dataclasses.fields(x)))
        return x
    return go(e)


def test_normalise_is_alpha_equivalent():
    src = "such that forAll i, j : int(1..3) . exists k in {i, j} . k = i + j - j"
    m = parse_model(src)
    n = parse_model(print_model(m, PrintConfig(normalise_quantified=True)))
    assert n != m
    assert _erase_binders(n.statements[0].exprs[0]) == _erase_binders(m.statements[0].exprs[0])
    assert "forAll q1, q2" in print_model(n)


def test_sm3_solution_text():
    (sol,) = solve(load_instance("sm3.essence"))
    assert print_solution(sol).split() == fixture_text("sm3.solution").split()


def test_gc_solution_listings():
    for model, param, listing in [("gc1.essence", "path-4.param", "gc1-path-4.solution"),
                                  ("gc1.essence", "disconnected-4.param", "gc1-disconnected-4.solution"),
                                  ("gc2.essence", "path-4.param", "gc2-path-4.solution"),
                                  ("gc2.essence", "disconnected-4.param", "gc2-disconnected-4.solution")]:
        (sol,) = solve(load_instance(model, param))
        assert print_solution(sol).split() == fixture_text(listing).split(), listing


def test_visualisation_grid():
    (sol,) = solve(load_instance("gc2.essence", "disconnected-4.param"))
    text = print_solution(sol)
    assert "$ T T _ _\n$ T T _ _\n$ _ _ T T\n$ _ _ T T" in text
    plain = print_solution(sol, PrintConfig(emit_visualisation_comments=False))
    assert "$" not in plain


def test_solution_names_sorted_and_reparse():
    (sol,) = solve(load_instance("sm3.essence"))
    text = print_solution(sol)
    names = [line.split()[1] for line in text.splitlines() if line.startswith("letting")]
    assert names == sorted(names)
    back = {s.name: s for s in parse_param(text, {"letters"})}
    assert set(back) == {n for n, _ in sol}


def test_empty_solution():
    assert print_solution([]) == ""


def test_values():
    assert print_value(SetV([3, 1])) == "{1, 3}"
    assert print_value(FunctionV([(0, 1)])) == "function(0 --> 1)"
    assert print_value(MatrixV.from_list([1, 2])) == "[1, 2; int(1..2)]"
    assert print_domain(parse_model("find x : set (size 2) of int(1..4)").statements[0].domain) \
        == "set (size 2) of int(1..4)"


def test_solution_values_reparse_to_same_values():
    inst = load_instance("gc2.essence", "disconnected-4.param")
    for sol in solve(inst, SolveConfig(number_of_solutions=None)):
        again = solution_values(inst, parse_param(print_solution(sol)))
        assert {n: vkey(v) for n, v in sol} == {n: vkey(v) for n, v in again.items()}


def test_expression_printing_keeps_grouping():
    for src in ["(a \\/ b) /\\ c", "a - (b - c)", "(2 ** 3) ** 2", "-(x ** 2)", "|x - y|"]:
        e = parse_expression(src)
        assert parse_expression(print_expr(e)) == e
