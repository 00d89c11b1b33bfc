from __future__ import annotations

import itertools
import math

import pytest

from essence import ast as A
from essence.domains import bell
from essence.errors import EvalError
from essence.evaluator import Env, ground_domain
from essence.parser import parse_domain, parse_model
from essence.solver import instantiate
from essence.values import (FunctionV, MSetV, PartitionV, RelationV, SetV, TupleV,
                            vkey)


def dom(src: str, prelude: str = ""):
    env = instantiate(parse_model(prelude)).env if prelude else Env()
    return ground_domain(parse_domain(src), env)


def values(src: str, prelude: str = "") -> list:
    return list(dom(src, prelude).enumerate())


# ---------------------------------------------------------------- oracles
# Written directly from the definitions, sharing no code with the library.

def oracle_set_partitions(items: list) -> list[list[list]]:
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for p in oracle_set_partitions(rest):
        out.append([[first]] + p)
        for i in range(len(p)):
            out.append(p[:i] + [[first] + p[i]] + p[i + 1:])
    return out


def oracle_equivalences(n: int) -> list[frozenset]:
    base = range(1, n + 1)
    pairs = [(a, b) for a in base for b in base]
    out = []
    for bits in itertools.product([0, 1], repeat=len(pairs)):
        R = frozenset(p for p, b in zip(pairs, bits) if b)
        if all((a, a) in R for a in base) \
                and all((b, a) in R for a, b in R) \
                and all((a, d) in R for a, b in R for c, d in R if b == c):
            out.append(R)
    return out


@pytest.mark.parametrize("n,k", [(n, k) for n in range(0, 6) for k in range(0, n + 2)])
def test_set_size_count(n, k):
    got = values(f"set (size {k}) of int(1..{n})")
    brute = [c for c in itertools.combinations(range(1, n + 1), k)]
    assert len(got) == len(brute) == math.comb(n, k)
    assert sorted(tuple(s.items) for s in got) == sorted(brute)


@pytest.mark.parametrize("n,k", [(n, k) for n in range(0, 4) for k in range(1, 4)])
def test_total_function_count(n, k):
    got = values(f"function (total) int(1..{n}) --> int(1..{k})")
    brute = list(itertools.product(range(1, k + 1), repeat=n))
    assert len(got) == len(brute) == k ** n
    assert {tuple(v for _, v in f.pairs) for f in got} == set(brute)


@pytest.mark.parametrize("n", range(0, 5))
def test_partition_count(n):
    got = values(f"partition from int(1..{n})")
    brute = oracle_set_partitions(list(range(1, n + 1)))
    assert len(got) == len(brute) == bell(n)
    as_sets = {frozenset(frozenset(p) for p in q) for q in brute}
    assert {frozenset(frozenset(x for x in part.items) for part in p.parts) for p in got} == as_sets


def test_equivalence_relations():
    got = values("relation (reflexive, symmetric, transitive) of (int(1..2) * int(1..2))")
    brute = oracle_equivalences(2)
    assert len(got) == len(brute) == 2
    assert {frozenset(t.items for t in r.items) for r in got} == set(brute)


def test_spec_enumeration_examples():
    assert [s.items for s in values("set (size 2) of int(1..3)")] == [(1, 2), (1, 3), (2, 3)]
    assert len(values("function (total) int(1..2) --> int(0..1)")) == 4
    assert len(values("partition from int(1..3)")) == 5


# ---------------------------------------------------------------- finiteness

@pytest.mark.parametrize("src,finite", [
    ("int(1..)", False),
    ("int", False),
    ("mset (maxSize 3) of bool", True),
    ("mset (maxOccur 2) of bool", True),
    ("mset of bool", False),
    ("set of int(1..3)", True),
    ("set of int(1..)", False),
    ("function int(1..2) --> int(0..)", False),
    ("sequence (maxSize 2) of bool", True),
    ("sequence of bool", False),
    ("matrix indexed by [int(1..2)] of bool", True),
])
def test_is_finite(src, finite):
    assert dom(src).is_finite() is finite


# ---------------------------------------------------------------- membership

def test_membership_examples():
    f = FunctionV(zip(range(1, 9), [2, 8, 1, 7, 0, 3, 6, 5]))
    assert dom("function (injective) int(1..8) --> int(0..9)").member(f)
    assert not dom("set (maxSize 2) of int(1..9)").member(SetV([1, 2, 3]))
    p = PartitionV([[1, 2], [3]])
    assert not dom("partition (regular) from int(1..3)").member(p)
    r = RelationV([TupleV((1, 1)), TupleV((2, 2))])
    assert dom("relation (reflexive) of (int(1..2) * int(1..2))").member(r)
    assert dom("function (bijective) int(0..1) --> int(0..1)").member(FunctionV([(0, 1), (1, 0)]))
    assert not dom("mset (maxOccur 2) of int(0..3)").member(MSetV([0, 0, 0]))


def test_contradictory_attributes_give_empty_domain():
    assert values("set (size 2, maxSize 1) of int(1..3)") == []
    assert values("set (minSize 3, maxSize 2) of int(1..5)") == []


def test_int_from_set_and_aliases():
    assert values("int(s)", "letting s be {1,3,5}") == [1, 3, 5]
    assert values("vertices", "letting n be 4\nletting vertices be domain int(1..n)") == [1, 2, 3, 4]
    cyclic = Env({"a": A.DomainAlias("b"), "b": A.DomainAlias("a")})
    with pytest.raises(EvalError):
        ground_domain(A.DomainAlias("a"), cyclic)


def test_enum_range_domain():
    pre = "letting d be new type enum {North, East, South, West}"
    assert [str(v) for v in values("d(East..)", pre)] == ["East", "South", "West"]


# every value of an attributed domain appears in its enumeration and nowhere else

BASE3 = [
    ("set of int(1..3)",
     ["set (size 2) of int(1..3)", "set (minSize 1, maxSize 2) of int(1..3)"]),
    ("mset (maxOccur 3) of int(1..3)",
     ["mset (size 2) of int(1..3)", "mset (maxOccur 1) of int(1..3)",
      "mset (minOccur 1, maxOccur 2) of int(1..3)"]),
    ("function int(1..3) --> int(1..3)",
     ["function (total) int(1..3) --> int(1..3)", "function (injective) int(1..3) --> int(1..3)",
      "function (surjective) int(1..3) --> int(1..3)", "function (bijective) int(1..3) --> int(1..3)",
      "function (size 2) int(1..3) --> int(1..3)"]),
    ("sequence (maxSize 3) of int(1..3)",
     ["sequence (size 2) of int(1..3)", "sequence (injective, maxSize 3) of int(1..3)",
      "sequence (surjective, maxSize 3) of int(1..3)"]),
    ("relation of (int(1..2) * int(1..2))",
     ["relation (reflexive) of (int(1..2) * int(1..2))",
      "relation (irreflexive) of (int(1..2) * int(1..2))",
      "relation (symmetric) of (int(1..2) * int(1..2))",
      "relation (antiSymmetric) of (int(1..2) * int(1..2))",
      "relation (transitive) of (int(1..2) * int(1..2))",
      "relation (total) of (int(1..2) * int(1..2))",
      "relation (connex) of (int(1..2) * int(1..2))",
      "relation (equivalence) of (int(1..2) * int(1..2))",
      "relation (partialOrder) of (int(1..2) * int(1..2))",
      "relation (size 2) of (int(1..2) * int(1..2))"]),
    ("partition from int(1..3)",
     ["partition (regular) from int(1..3)", "partition (numParts 2) from int(1..3)",
      "partition (maxPartSize 1) from int(1..3)", "partition (minPartSize 2) from int(1..3)"]),
]


@pytest.mark.parametrize("universe,src", [(u, s) for u, ss in BASE3 for s in ss])
def test_member_iff_enumerated(universe, src):
    d = dom(src)
    listed = {vkey(v) for v in d.enumerate()}
    for v in dom(universe).enumerate():
        assert d.member(v) == (vkey(v) in listed)
    assert listed <= {vkey(v) for v in dom(universe).enumerate()}


@pytest.mark.parametrize("src", [u for u, _ in BASE3] + [s for _, ss in BASE3 for s in ss])
def test_enumeration_strictly_increasing(src):
    keys = [vkey(v) for v in dom(src).enumerate()]
    assert all(a < b for a, b in zip(keys, keys[1:]))
