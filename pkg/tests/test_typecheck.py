from __future__ import annotations

import pytest

from conftest import FIXTURES, fixture_text
from essence.errors import TypeCheckError
from essence.parser import parse_domain, parse_expression, parse_model
from essence.typecheck import (BOOL, INT, SymbolTable, TEnum, TFunction, TInt, TMatrix,
                               TRelation, TSet, TTuple, check_model, type_of,
                               type_of_domain)


def check(src: str):
    return check_model(parse_model(src))


def model_type(src: str, name: str):
    return check(src).symbols.get(name).type


@pytest.mark.parametrize("name", sorted(p.name for p in FIXTURES.glob("*.essence")
                                        if p.name != "sm3-literal.essence"))
def test_fixtures_typecheck(name):
    check(fixture_text(name))


def test_literal_sm3_is_ill_typed():
    # `M > 0` compares an enum member with an integer
    with pytest.raises(TypeCheckError, match="M > 0"):
        check(fixture_text("sm3-literal.essence"))


def test_domain_types():
    assert type_of_domain(parse_domain("set (size 2) of int(1..4)"), SymbolTable()) == TSet(INT)
    t = model_type("letting letters be new type enum {S, E}\n"
                   "find f : function (injective, total) letters --> int(0..9)", "f")
    assert t == TFunction(TEnum("letters"), INT)
    t = model_type("letting E be domain matrix indexed by [int(1..5)] of int(-1..1)\n"
                   "letting D2 be domain matrix indexed by [int(1..2)] of E\n"
                   "find x : D2", "x")
    assert t == TMatrix(INT, TMatrix(INT, INT))


def test_operator_types():
    assert type_of(parse_expression("1 + 2")) == INT
    assert type_of(parse_expression("toRelation(function(1 --> true))")) == TRelation((INT, BOOL))
    assert type_of(parse_expression("hist(mset(1, 1))")) == TSet(TTuple((INT, INT)))
    t = model_type("letting direction be new type enum {North, East}\n"
                   "letting p be pred(East)", "p")
    assert t == TEnum("direction")


@pytest.mark.parametrize("src", [
    "find a : bool minimising a",
    "find x : int(0..3) given n : int(0..3) where x > 0",
    "letting d be new type enum {a, b} letting x be a + 1",
    "letting u be new type of size 3 find x, y : u such that x < y",
    "find x : int(0..3) such that x",
    "find x : int(0..3) such that y = 1 find y : int(0..3)",
    "find i : int(0..3) such that forAll i : int(0..3) . i > 0",
    "letting f be function(1 --> 2) such that image(f, {1}) = 2",
    "letting t be (1, 2) such that t[3] = 1",
    "such that {} = {}",
    "find x : int(0..3) letting s be domain int(x..3)",
    "find x : int(0..3) find y : int(x..3)",
    "find x : int(0..3) find x : bool",
    "such that 1 = true",
    "find x : int(0..3) such that x in 3",
])
def test_rejected(src):
    with pytest.raises(TypeCheckError):
        check(src)


@pytest.mark.parametrize("src", [
    "find a : bool minimising toInt(a)",
    "letting s be sequence(1) letting t be sequence() such that s != t",
    "such that forAll i : int(0..3) . i >= 0, forAll i : int(0..3) . i < 4",
    "letting d be new type enum {a, b} find x : d such that x < b, succ(x) = b",
    "letting u be new type of size 3 find x, y : u such that x != y",
    "find m : matrix indexed by [int(1..2), int(1..2)] of bool such that m[1,2] = m[1][2]",
    "letting t be tuple(0, true) such that t[2]",
    "find r : record {a : int(0..2), b : bool} such that r[b] -> (r[a] = 1)",
    "such that |{1, 2}| = |-2|",
    "letting M be [[1,2],[3,4]] such that flatten(0, M) = M, flatten(M) = [1,2,3,4]",
])
def test_accepted(src):
    check(src)


def test_declare_before_use_under_permutation():
    stmts = ["letting n be 3", "find x : int(0..n)", "such that x > 1"]
    check("\n".join(stmts))
    with pytest.raises(TypeCheckError):
        check("\n".join([stmts[1], stmts[0], stmts[2]]))
    with pytest.raises(TypeCheckError):
        check("\n".join([stmts[2], stmts[0], stmts[1]]))


def test_symbol_table_records_kinds():
    table = check(fixture_text("sm3.essence")).symbols
    assert table.get("f").kind == "find"
    assert table.get("letters").kind == "enum-type"
    assert table.get("S").kind == "enum-member"
    assert table.get("carry4").type == TInt()
