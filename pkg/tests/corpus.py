"""Annotated expression examples, each paired with its documented value.

Entries are (prelude, expression, expected), where ``expected`` is Essence
source evaluated under the same prelude.
"""

from __future__ import annotations

MATRICES = """
letting A be [[-1,1,1,0,1],[1,1,1,1,1]]
letting B be [A[1],[0,0,0,0,0]]
letting C be [[-1,1,1,0,1],[0,0,0,0,0]]
"""
TUPLES = "letting s be tuple(0,1,1,0)\nletting t be tuple(0,0,0,1)"
DIRECTION = "letting direction be new type enum {North, East, South, West}"
SEQUENCES = "letting s be sequence(1,1)\nletting t be sequence(2,1,3,1)"
MSET = "letting S be mset(0,1,-1,1)"
RESTRICT = """
letting f be function(0-->1,3-->4)
letting D be domain int(0,2)
letting g be restrict(f, D)
"""
PARTITION = "letting P be partition({1,2},{3},{4,5,6})"
COMPREHENSION = "letting M be [1,0,0,1,0]\nletting I be domain int(1..5)"

CORPUS: list[tuple[str, str, str]] = [
    # matrix indexing
    (MATRICES, "A[1][1] = -1", "true"),
    (MATRICES, "A[1,1] = -1", "true"),
    (MATRICES, "C[1] = [-1,1,1,0,1]", "true"),
    (MATRICES, "B[1] = C[1]", "true"),
    (MATRICES, "[A[1],B[2]] = C", "true"),
    (MATRICES, "B = C", "true"),
    # tuples
    (TUPLES, "s[1] = t[1]", "true"),
    # comparisons
    ("", "(false \\/ true)", "true"),
    (DIRECTION, "(North < South) /\\ (South < West)", "true"),
    ("", "false <= true", "true"),
    # sets
    ("", "1 in {0,1}", "true"),
    ("", "{0,1} subset {0,1}", "false"),
    ("", "{0,1} subsetEq {0,1}", "true"),
    ("", "{0,1} supset {}", "true"),
    ("", "{0,1} supsetEq {1,0}", "true"),
    ("", "{1,2,3} intersect {3,4}", "{3}"),
    ("", "{1,2,3} union {3,4}", "{1,2,3,4}"),
    ("", "powerSet({0})", "{{},{0}}"),
    ("", "|{0,1,2,1,2,1}|", "3"),
    ("", "{0,1,2} - {2,3}", "{0,1}"),
    # sequences
    (SEQUENCES, "s subsequence t", "true"),
    (SEQUENCES, "s substring t", "false"),
    (SEQUENCES, "|t|", "4"),
    # enumerated types
    (DIRECTION, "succ(East)", "South"),
    (DIRECTION, "max([North, South]) > East", "true"),
    # multisets
    (MSET, "freq(S,1) = 2", "true"),
    (MSET, "freq(S,0) = 2", "false"),
    (MSET, "max(S) - min(S)", "2"),
    ("", "max([1,2])", "2"),
    # functions
    (RESTRICT, "g", "function(0-->1)"),
    (RESTRICT, "(defined(g) = defined(f) intersect toSet([i | i : D])) "
               "/\\ (forAll x in defined(g) . g(x) = f(x))", "true"),
    ("", "inverse(function(0-->1),function(1-->0))", "true"),
    ("", "inverse(function(0-->1),function(1-->1))", "false"),
    # matrices
    ("", "allDiff([1,2,4,1])", "false"),
    ("", "alldifferent_except([1,2,4,1], 1)", "true"),
    # partitions
    (PARTITION, "apart({3,5},P) /\\ !together({1,2,5},P)", "true"),
    (PARTITION, "participants(P)", "{1,2,3,4,5,6}"),
    (PARTITION, "party(4,P)", "{4,5,6}"),
    (PARTITION, "{{1,2},{3},{4,5,6}} = parts(P)", "true"),
    (PARTITION, "together({1,7},P) \\/ apart({1,7},P)", "false"),
    # list combining
    ("", "sum( {1,2,3} )", "6"),
    ("", "product( [1,2,4] )", "8"),
    ("", "and([xor([true,false]),or([false,true])])", "true"),
    ("", "forAll i in {0,1,2} . i=i*i", "false"),
    ("", "exists i : int(0..4) . i*i=i", "true"),
    # comprehensions
    ("", "product( [i-1 | i <- [5,6,7]] )", "120"),
    (COMPREHENSION, "sum( [toInt((i=j) /\\ (M[j]>0)) | i : I, j <- M] )", "2"),
    ("", "and([u<v | (u,v) <- [(0,1),(2**10,2**11),(-1,1)] ])", "true"),
]
