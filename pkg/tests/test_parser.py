from __future__ import annotations

import pytest

from conftest import FIXTURES, fixture_text
from essence import ast as A
from essence.errors import ParseError
from essence.lexer import tokenize
from essence.parser import parse_domain, parse_expression, parse_model, parse_param


def kinds(src):
    return [(t.kind, t.text) for t in tokenize(src)]


def test_tokens():
    assert kinds("find x : bool") == [("keyword", "find"), ("ident", "x"), ("punct", ":"),
                                      ("keyword", "bool"), ("eof", "")]
    assert kinds("") == [("eof", "")]
    toks = kinds("a = false \\/ true $ c")
    assert ("op", "\\/") in toks and toks[-1] == ("eof", "") and ("ident", "c") not in toks


@pytest.mark.parametrize("op", ["-->", "->", "<->", "<=lex", ">=lex", "<lex", ">lex",
                                "<=", ">=", "!=", "..", "**", "/\\", "\\/", "<-"])
def test_multichar_operators_are_single_tokens(op):
    toks = tokenize(f"a {op} b")
    assert toks[1].text == op


def test_positions_and_stray_character():
    toks = tokenize("find x\n  : bool")
    assert (toks[2].line, toks[2].column) == (2, 3)
    with pytest.raises(ParseError) as e:
        tokenize("find x : bool ?")
    assert e.value.line == 1 and e.value.column == 15


def test_sm3_structure():
    m = parse_model(fixture_text("sm3.essence"))
    kinds_ = [type(s).__name__ for s in m.statements]
    assert kinds_ == ["LettingEnum", "Find", "Find", "SuchThat"]
    assert len(m.statements[2].names) == 4
    assert len(m.statements[3].exprs) == 7


def test_language_header():
    m = parse_model("language Essence 1.3\nfind x : bool")
    assert m.language == (1, 3)


def test_letting_domain():
    m = parse_model("letting d be domain set of int(a..b)")
    (s,) = m.statements
    assert s == A.LettingDomain("d", A.SetDomain((), A.IntDomain((A.Bounded(A.Ref("a"), A.Ref("b")),))))


@pytest.mark.parametrize("src", [
    "find x : int(0..3) maximising x minimising x",
    "find x : int(0..3) branching on [x] branching on [x]",
    "find x : bool such that",
    "find x : set (colour 2) of bool",
])
def test_model_errors(src):
    with pytest.raises(ParseError):
        parse_model(src)


def test_domains():
    d = parse_domain("function (injective) letters --> int(0..9)", {"letters"})
    assert isinstance(d, A.FunctionDomain) and d.attrs == (("injective", None),)
    assert d.source == A.EnumDomain("letters", ())
    m = parse_domain("matrix indexed by [int(0..m), vertices, vertices] of bool")
    assert isinstance(m, A.MatrixDomain) and len(m.indices) == 3 and m.element == A.BoolDomain()
    s = parse_domain("set (size 2) of vertices")
    assert s == A.SetDomain((("size", A.IntLit(2)),), A.DomainAlias("vertices"))
    t = parse_domain("(int(0..2), bool)")
    assert isinstance(t, A.TupleDomain) and len(t.components) == 2
    r = parse_domain("relation (symmetric) of (int(1..2) * int(1..2))")
    assert isinstance(r, A.RelationDomain) and len(r.components) == 2


def test_precedence():
    e = parse_expression("a = false \\/ true")
    assert e == A.BinaryOp("\\/", A.BinaryOp("=", A.Ref("a"), A.BoolLit(False)), A.BoolLit(True))
    assert parse_expression("2**3**2") == A.BinaryOp("**", A.IntLit(2),
                                                     A.BinaryOp("**", A.IntLit(3), A.IntLit(2)))
    assert parse_expression("1 + 2 * 3") == A.BinaryOp("+", A.IntLit(1),
                                                       A.BinaryOp("*", A.IntLit(2), A.IntLit(3)))
    assert parse_expression("B = {1,2,3} union {3,4}").op == "="
    assert parse_expression("T = {0,1,2} - {2,3}").op == "="


def test_quantifier_body_extends_right():
    e = parse_expression("exists w : vertices . ({u,w} in G) /\\ (reach[w,v] = reach[u,v] - 1)")
    assert isinstance(e, A.Quantified) and e.body.op == "/\\"


def test_comprehension():
    e = parse_expression("[i-1 | i <- [5,6,7]]")
    assert isinstance(e, A.Comprehension)
    (g,) = e.clauses
    assert g.pattern == A.NamePattern("i") and g.how == "<-"


def test_matrix_literal_with_index():
    e = parse_expression("[0, 1; int(1..2)]")
    assert isinstance(e, A.MatrixLit) and e.index is not None


def test_params():
    ps = parse_param(fixture_text("path-4.param"))
    assert [p.name for p in ps] == ["n", "G"]
    assert ps[0].expr == A.IntLit(4)
    assert parse_param("") == []
    with pytest.raises(ParseError):
        parse_param("find x : bool")


@pytest.mark.parametrize("path", sorted(p.name for p in FIXTURES.iterdir()))
def test_every_fixture_parses(path):
    text = fixture_text(path)
    if path.endswith(".essence"):
        parse_model(text)
    else:
        parse_param(text)
