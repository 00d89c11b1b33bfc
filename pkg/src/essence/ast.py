"""Abstract syntax for models, domains and expressions.

All nodes are frozen dataclasses holding tuples, so structural equality is
plain ``==`` and nodes can be hashed and shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, is_dataclass
from typing import Iterator, Union

from .values import Value, vkey


# ---------------------------------------------------------------- ranges

@dataclass(frozen=True)
class Single:
    value: Expr


@dataclass(frozen=True)
class From:
    lo: Expr


@dataclass(frozen=True)
class To:
    hi: Expr


@dataclass(frozen=True)
class Bounded:
    lo: Expr
    hi: Expr


@dataclass(frozen=True)
class Open:
    pass


Range = Union[Single, From, To, Bounded, Open]

# ---------------------------------------------------------------- domains

Attrs = tuple  # tuple of (keyword, Expr | None), in source order

VALUED_ATTRS = frozenset({
    "size", "minSize", "maxSize", "minOccur", "maxOccur",
    "numParts", "minNumParts", "maxNumParts", "partSize", "minPartSize", "maxPartSize",
})
BINARY_RELATION_ATTRS = frozenset({
    "reflexive", "irreflexive", "coreflexive", "symmetric", "antiSymmetric",
    "aSymmetric", "transitive", "total", "connex", "Euclidean", "serial",
    "equivalence", "partialOrder",
})
_CARD = {"size", "minSize", "maxSize"}
ATTRS_FOR = {
    "set": frozenset(_CARD),
    "mset": frozenset(_CARD | {"minOccur", "maxOccur"}),
    "function": frozenset(_CARD | {"injective", "surjective", "bijective", "total"}),
    "sequence": frozenset(_CARD | {"injective", "surjective", "bijective"}),
    "relation": frozenset(_CARD | BINARY_RELATION_ATTRS),
    "partition": frozenset({"numParts", "minNumParts", "maxNumParts", "partSize",
                            "minPartSize", "maxPartSize", "regular"}),
}


@dataclass(frozen=True)
class BoolDomain:
    pass


@dataclass(frozen=True)
class IntDomain:
    ranges: tuple[Range, ...] = ()


@dataclass(frozen=True)
class IntFromSet:
    expr: Expr


@dataclass(frozen=True)
class EnumDomain:
    name: str
    ranges: tuple[Range, ...] = ()


@dataclass(frozen=True)
class UnnamedDomain:
    name: str


@dataclass(frozen=True)
class TupleDomain:
    components: tuple[Domain, ...]


@dataclass(frozen=True)
class RecordDomain:
    fields: tuple[tuple[str, Domain], ...]


@dataclass(frozen=True)
class VariantDomain:
    fields: tuple[tuple[str, Domain], ...]


@dataclass(frozen=True)
class MatrixDomain:
    indices: tuple[Domain, ...]
    element: Domain


@dataclass(frozen=True)
class SetDomain:
    attrs: Attrs
    element: Domain


@dataclass(frozen=True)
class MSetDomain:
    attrs: Attrs
    element: Domain


@dataclass(frozen=True)
class FunctionDomain:
    attrs: Attrs
    source: Domain
    target: Domain


@dataclass(frozen=True)
class SequenceDomain:
    attrs: Attrs
    element: Domain


@dataclass(frozen=True)
class RelationDomain:
    attrs: Attrs
    components: tuple[Domain, ...]


@dataclass(frozen=True)
class PartitionDomain:
    attrs: Attrs
    element: Domain


@dataclass(frozen=True)
class DomainAlias:
    name: str


Domain = Union[BoolDomain, IntDomain, IntFromSet, EnumDomain, UnnamedDomain,
               TupleDomain, RecordDomain, VariantDomain, MatrixDomain, SetDomain,
               MSetDomain, FunctionDomain, SequenceDomain, RelationDomain,
               PartitionDomain, DomainAlias]

DOMAIN_TYPES = (BoolDomain, IntDomain, IntFromSet, EnumDomain, UnnamedDomain,
                TupleDomain, RecordDomain, VariantDomain, MatrixDomain, SetDomain,
                MSetDomain, FunctionDomain, SequenceDomain, RelationDomain,
                PartitionDomain, DomainAlias)


def attr_map(attrs: Attrs) -> dict[str, Expr | None]:
    return dict(attrs)

# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Const:
    """An already-evaluated value embedded in an expression tree."""
    value: Value

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Const) and vkey(self.value) == vkey(other.value)

    def __hash__(self) -> int:
        return hash(vkey(self.value))


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class MatrixLit:
    items: tuple[Expr, ...]
    index: Domain | None = None


@dataclass(frozen=True)
class SetLit:
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class MSetLit:
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class TupleLit:
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class RecordLit:
    fields: tuple[tuple[str, Expr], ...]


@dataclass(frozen=True)
class VariantLit:
    name: str
    value: Expr


@dataclass(frozen=True)
class FunctionLit:
    pairs: tuple[tuple[Expr, Expr], ...]


@dataclass(frozen=True)
class SequenceLit:
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class RelationLit:
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class PartitionLit:
    parts: tuple[tuple[Expr, ...], ...]


@dataclass(frozen=True)
class UnaryOp:
    op: str  # "-", "!", "factorial", "||"
    operand: Expr


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Apply:
    func: Expr
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Index:
    base: Expr
    indices: tuple[Expr, ...]


@dataclass(frozen=True)
class NamePattern:
    name: str


@dataclass(frozen=True)
class TuplePattern:
    items: tuple[Pattern, ...]


Pattern = Union[NamePattern, TuplePattern]


@dataclass(frozen=True)
class Binder:
    patterns: tuple[Pattern, ...]
    how: str  # ":" over a domain, "in" over a collection
    source: object  # Domain for ":", Expr for "in"


@dataclass(frozen=True)
class Quantified:
    kind: str  # forAll | exists | sum | product
    binders: tuple[Binder, ...]
    body: Expr


@dataclass(frozen=True)
class Generator:
    pattern: Pattern
    how: str  # ":" over a domain, "<-" over a list
    source: object


@dataclass(frozen=True)
class Condition:
    expr: Expr


@dataclass(frozen=True)
class Comprehension:
    head: Expr
    clauses: tuple[Generator | Condition, ...]


@dataclass(frozen=True)
class DomainExpr:
    domain: Domain


Expr = Union[IntLit, BoolLit, Const, Ref, MatrixLit, SetLit, MSetLit, TupleLit,
             RecordLit, VariantLit, FunctionLit, SequenceLit, RelationLit,
             PartitionLit, UnaryOp, BinaryOp, Call, Apply, Index, Quantified,
             Comprehension, DomainExpr]

# ---------------------------------------------------------------- statements


@dataclass(frozen=True)
class Find:
    names: tuple[str, ...]
    domain: Domain


@dataclass(frozen=True)
class Given:
    names: tuple[str, ...]
    domain: Domain


@dataclass(frozen=True)
class LettingExpr:
    name: str
    expr: Expr


@dataclass(frozen=True)
class LettingDomain:
    name: str
    domain: Domain


@dataclass(frozen=True)
class GivenEnum:
    name: str


@dataclass(frozen=True)
class LettingEnum:
    name: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class LettingUnnamed:
    name: str
    size: Expr


@dataclass(frozen=True)
class SuchThat:
    exprs: tuple[Expr, ...]


@dataclass(frozen=True)
class Where:
    exprs: tuple[Expr, ...]


@dataclass(frozen=True)
class Branching:
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class Objective:
    sense: str  # minimising | maximising
    expr: Expr


Statement = Union[Find, Given, LettingExpr, LettingDomain, GivenEnum, LettingEnum,
                  LettingUnnamed, SuchThat, Where, Branching, Objective]


@dataclass(frozen=True)
class Model:
    statements: tuple[Statement, ...]
    language: tuple[int, int] | None = None

    def finds(self) -> list[tuple[str, Domain]]:
        return [(n, s.domain) for s in self.statements if isinstance(s, Find) for n in s.names]

    def givens(self) -> list[tuple[str, Domain]]:
        return [(n, s.domain) for s in self.statements if isinstance(s, Given) for n in s.names]

    def objective(self) -> Objective | None:
        return next((s for s in self.statements if isinstance(s, Objective)), None)

    def branching(self) -> Branching | None:
        return next((s for s in self.statements if isinstance(s, Branching)), None)

    def constraints(self) -> list[Expr]:
        return [e for s in self.statements if isinstance(s, SuchThat) for e in s.exprs]


def structural_equal(a: object, b: object) -> bool:
    """Equality of syntax trees (or values) ignoring layout and comments."""
    if is_dataclass(a) or is_dataclass(b) or isinstance(a, tuple):
        return a == b
    return vkey(a) == vkey(b)


def children(node: object) -> Iterator[object]:
    """Immediate sub-nodes of any AST node, flattening tuples."""
    if not is_dataclass(node) or isinstance(node, Const):
        return
    for f in fields(node):
        yield from _flatten(getattr(node, f.name))


def _flatten(x: object) -> Iterator[object]:
    if isinstance(x, tuple):
        for y in x:
            yield from _flatten(y)
    elif is_dataclass(x):
        yield x


def walk(node: object) -> Iterator[object]:
    yield node
    for c in children(node):
        yield from walk(c)


def referenced_names(node: object) -> set[str]:
    """Names a node mentions, including domain aliases and enum types.

    Quantified names are not subtracted, so callers wanting free names should
    compare against the declared top-level names.
    """
    out: set[str] = set()
    for n in walk(node):
        match n:
            case Ref(name) | DomainAlias(name) | EnumDomain(name, _) | UnnamedDomain(name):
                out.add(name)
    return out
