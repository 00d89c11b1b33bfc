"""Static checking: declare-before-use, scoping and operator typing.

A type is a domain with attributes and bounds removed. Matrix types are
always one dimension deep; ``matrix indexed by [A, B] of E`` has the same
type as ``matrix indexed by [A] of matrix indexed by [B] of E``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ast as A
from .errors import TypeCheckError
from .values import (EnumV, FunctionV, MatrixV, MSetV, PartitionV, RecordV,
                     RelationV, SequenceV, SetV, TupleV, UnnamedV, VariantV)


# ---------------------------------------------------------------- types

class Type:
    pass


@dataclass(frozen=True)
class TBool(Type):
    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class TInt(Type):
    def __str__(self):
        return "int"


@dataclass(frozen=True)
class TEnum(Type):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TUnnamed(Type):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TTuple(Type):
    items: tuple[Type, ...]

    def __str__(self):
        return f"tuple({', '.join(map(str, self.items))})"


@dataclass(frozen=True)
class TRecord(Type):
    fields: tuple[tuple[str, Type], ...]

    def __str__(self):
        return "record {" + ", ".join(f"{n} : {t}" for n, t in self.fields) + "}"


@dataclass(frozen=True)
class TVariant(Type):
    fields: tuple[tuple[str, Type], ...]
    open: bool = False  # a literal names only its active field

    def __str__(self):
        return "variant {" + ", ".join(f"{n} : {t}" for n, t in self.fields) + "}"


@dataclass(frozen=True)
class TMatrix(Type):
    index: Type
    element: Type

    def __str__(self):
        return f"matrix indexed by [{self.index}] of {self.element}"


@dataclass(frozen=True)
class TSet(Type):
    element: Type

    def __str__(self):
        return f"set of {self.element}"


@dataclass(frozen=True)
class TMSet(Type):
    element: Type

    def __str__(self):
        return f"mset of {self.element}"


@dataclass(frozen=True)
class TFunction(Type):
    source: Type
    target: Type

    def __str__(self):
        return f"function {self.source} --> {self.target}"


@dataclass(frozen=True)
class TSequence(Type):
    element: Type

    def __str__(self):
        return f"sequence of {self.element}"


@dataclass(frozen=True)
class TRelation(Type):
    components: tuple[Type, ...]

    def __str__(self):
        return f"relation of ({' * '.join(map(str, self.components))})"


@dataclass(frozen=True)
class TPartition(Type):
    element: Type

    def __str__(self):
        return f"partition from {self.element}"


@dataclass(frozen=True)
class TAny(Type):
    """Element type of an empty literal, fixed by unification."""

    def __str__(self):
        return "?"


@dataclass(frozen=True)
class TDomain(Type):
    """The type of an expression that denotes a domain."""
    element: Type

    def __str__(self):
        return f"domain of {self.element}"


BOOL, INT, ANY = TBool(), TInt(), TAny()


def tmatrix(indices: list[Type], element: Type) -> TMatrix:
    out = element
    for t in reversed(indices):
        out = TMatrix(t, out)
    return out


def unify(a: Type, b: Type) -> Type | None:
    """Most specific type compatible with both, or None."""
    if isinstance(a, TAny):
        return b
    if isinstance(b, TAny):
        return a
    if type(a) is not type(b):
        return None
    match a:
        case TBool() | TInt():
            return a
        case TEnum(n) | TUnnamed(n):
            return a if n == b.name else None
        case TTuple(items):
            if len(items) != len(b.items):
                return None
            us = [unify(x, y) for x, y in zip(items, b.items)]
            return None if None in us else TTuple(tuple(us))
        case TRelation(items):
            if len(items) != len(b.components):
                return None
            us = [unify(x, y) for x, y in zip(items, b.components)]
            return None if None in us else TRelation(tuple(us))
        case TRecord(fs):
            if [n for n, _ in fs] != [n for n, _ in b.fields]:
                return None
            us = [unify(x, y) for (_, x), (_, y) in zip(fs, b.fields)]
            return None if None in us else TRecord(tuple((n, u) for (n, _), u in zip(fs, us)))
        case TVariant():
            return _unify_variant(a, b)
        case TMatrix(i, e):
            ui, ue = unify(i, b.index), unify(e, b.element)
            return None if ui is None or ue is None else TMatrix(ui, ue)
        case TFunction(s, t):
            us, ut = unify(s, b.source), unify(t, b.target)
            return None if us is None or ut is None else TFunction(us, ut)
        case TSet(e) | TMSet(e) | TSequence(e) | TPartition(e) | TDomain(e):
            u = unify(e, b.element)
            return None if u is None else type(a)(u)
    return None


def _unify_variant(a: TVariant, b: TVariant) -> Type | None:
    if a.open and not b.open:
        a, b = b, a
    fa = dict(a.fields)
    for n, t in b.fields:
        if n not in fa or unify(fa[n], t) is None:
            if not (a.open and b.open):
                return None
    if a.open and b.open:
        merged = dict(a.fields)
        for n, t in b.fields:
            if n in merged and unify(merged[n], t) is None:
                return None
            merged.setdefault(n, t)
        return TVariant(tuple(sorted(merged.items())), True)
    return a


def has_any(t: Type) -> bool:
    if isinstance(t, TAny):
        return True
    for f in getattr(t, "__dataclass_fields__", {}):
        x = getattr(t, f)
        if isinstance(x, Type) and has_any(x):
            return True
        if isinstance(x, tuple):
            for y in x:
                if isinstance(y, Type) and has_any(y):
                    return True
                if isinstance(y, tuple) and any(isinstance(z, Type) and has_any(z) for z in y):
                    return True
    return False


ORDERED = (TInt, TBool, TEnum)


# ---------------------------------------------------------------- symbols

@dataclass
class Symbol:
    name: str
    kind: str  # find|given|letting-expr|letting-domain|enum-type|enum-member|unnamed-type|quantified
    type: Type
    order: int
    decision: bool = False  # depends on a find


@dataclass
class SymbolTable:
    symbols: dict[str, Symbol] = field(default_factory=dict)

    def declare(self, name: str, kind: str, t: Type, decision: bool = False) -> Symbol:
        if name in self.symbols:
            raise TypeCheckError(f"{name} is declared twice", name)
        s = Symbol(name, kind, t, len(self.symbols), decision)
        self.symbols[name] = s
        return s

    def get(self, name: str) -> Symbol | None:
        return self.symbols.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.symbols


@dataclass
class Checked:
    symbols: SymbolTable
    types: list[tuple[A.Expr, Type]]


def _where(e: object) -> str:
    try:
        from .printer import print_expr
        return print_expr(e)
    except Exception:
        return repr(e)


def _err(msg: str, e: object = None) -> TypeCheckError:
    return TypeCheckError(f"{msg}" + (f" in `{_where(e)}`" if e is not None else ""), e)


# ---------------------------------------------------------------- checker

class Checker:
    def __init__(self, table: SymbolTable | None = None) -> None:
        self.table = table or SymbolTable()
        self.locals: list[dict[str, Type]] = []

    # -------------------------------------------------------- scope

    def _local(self, name: str) -> Type | None:
        for layer in reversed(self.locals):
            if name in layer:
                return layer[name]
        return None

    def bind_local(self, name: str, t: Type, node: object) -> None:
        s = self.table.get(name)
        if s is not None and s.kind in ("find", "given"):
            raise _err(f"quantified variable {name} shadows a top-level {s.kind}", node)
        self.locals[-1][name] = t

    # -------------------------------------------------------- domains

    def domain(self, d: A.Domain) -> Type:
        """The type of a domain, checking every expression inside it."""
        match d:
            case A.BoolDomain():
                return BOOL
            case A.IntDomain(ranges):
                for r in ranges:
                    for x in _range_exprs(r):
                        t = self.expr(x)
                        if not (isinstance(t, TInt) or (isinstance(r, A.Single) and
                                                        _int_collection(t))):
                            raise _err("integer domain bounds must be integers", x)
                return INT
            case A.IntFromSet(expr):
                t = self.expr(expr)
                if not (isinstance(t, TInt) or _int_collection(t)):
                    raise _err("int(...) needs an integer or a set of integers", expr)
                if self.mentions_decision(expr):
                    raise _err("int(...) cannot refer to decision variables", expr)
                return INT
            case A.EnumDomain(name, ranges):
                s = self.table.get(name)
                if s is None:
                    raise _err(f"{name} is not declared")
                if s.kind == "letting-domain" and not ranges:
                    return s.type.element
                if s.kind != "enum-type":
                    raise _err(f"{name} is not an enumerated type")
                for r in ranges:
                    for x in _range_exprs(r):
                        if self.expr(x) != TEnum(name):
                            raise _err(f"enum range bound is not a member of {name}", x)
                return TEnum(name)
            case A.UnnamedDomain(name):
                s = self.table.get(name)
                if s is None or s.kind != "unnamed-type":
                    raise _err(f"{name} is not an unnamed type")
                return TUnnamed(name)
            case A.DomainAlias(name):
                s = self.table.get(name)
                if s is None:
                    raise _err(f"{name} is not declared")
                if s.kind == "letting-domain":
                    return s.type.element
                if s.kind == "enum-type":
                    return TEnum(name)
                if s.kind == "unnamed-type":
                    return TUnnamed(name)
                raise _err(f"{name} is not a domain")
            case A.TupleDomain(cs):
                return TTuple(tuple(self.domain(c) for c in cs))
            case A.RecordDomain(fs):
                _distinct([n for n, _ in fs], "record field")
                return TRecord(tuple(sorted((n, self.domain(c)) for n, c in fs)))
            case A.VariantDomain(fs):
                _distinct([n for n, _ in fs], "variant field")
                return TVariant(tuple(sorted((n, self.domain(c)) for n, c in fs)))
            case A.MatrixDomain(indices, element):
                its = [self.domain(i) for i in indices]
                for i, t in zip(indices, its):
                    if not isinstance(t, (TInt, TBool, TEnum, TUnnamed)):
                        raise _err("matrix index domains must be int, bool, enum or unnamed")
                return tmatrix(its, self.domain(element))
            case A.SetDomain(attrs, element):
                self.attrs(attrs)
                return TSet(self.domain(element))
            case A.MSetDomain(attrs, element):
                self.attrs(attrs)
                return TMSet(self.domain(element))
            case A.FunctionDomain(attrs, source, target):
                self.attrs(attrs)
                return TFunction(self.domain(source), self.domain(target))
            case A.SequenceDomain(attrs, element):
                self.attrs(attrs)
                return TSequence(self.domain(element))
            case A.RelationDomain(attrs, cs):
                self.attrs(attrs)
                ts = tuple(self.domain(c) for c in cs)
                if any(n in A.BINARY_RELATION_ATTRS for n, _ in attrs):
                    if len(ts) != 2 or ts[0] != ts[1]:
                        raise _err("binary relation attributes need two components of the same type")
                return TRelation(ts)
            case A.PartitionDomain(attrs, element):
                self.attrs(attrs)
                return TPartition(self.domain(element))
        raise _err(f"unknown domain {d!r}")

    def attrs(self, attrs: A.Attrs) -> None:
        for name, x in attrs:
            if x is not None and not isinstance(self.expr(x), TInt):
                raise _err(f"attribute {name} needs an integer", x)

    # -------------------------------------------------------- expressions

    def mentions_decision(self, e: object) -> bool:
        for n in A.walk(e):
            if isinstance(n, A.Ref) and self._local(n.name) is None:
                s = self.table.get(n.name)
                if s is not None and s.decision:
                    return True
        return False

    def expr(self, e: A.Expr) -> Type:
        t = self._expr(e)
        return t

    def _expr(self, e: A.Expr) -> Type:
        match e:
            case A.IntLit():
                return INT
            case A.BoolLit():
                return BOOL
            case A.Const(v):
                return type_of_value(v)
            case A.Ref(name):
                return self.ref(e)
            case A.MatrixLit(items, index):
                it = self.domain(index) if index is not None else INT
                return TMatrix(it, self.unify_all(items, e))
            case A.SetLit(items):
                return TSet(self.unify_all(items, e))
            case A.MSetLit(items):
                return TMSet(self.unify_all(items, e))
            case A.SequenceLit(items):
                return TSequence(self.unify_all(items, e))
            case A.TupleLit(items):
                return TTuple(tuple(self.expr(x) for x in items))
            case A.RecordLit(fs):
                _distinct([n for n, _ in fs], "record field")
                return TRecord(tuple(sorted((n, self.expr(x)) for n, x in fs)))
            case A.VariantLit(name, value):
                return TVariant(((name, self.expr(value)),), True)
            case A.FunctionLit(pairs):
                return TFunction(self.unify_all([k for k, _ in pairs], e),
                                 self.unify_all([v for _, v in pairs], e))
            case A.RelationLit(items):
                t = self.unify_all(items, e)
                if isinstance(t, TAny):
                    return TRelation((ANY,))
                if not isinstance(t, TTuple):
                    raise _err("relation literals hold tuples", e)
                return TRelation(t.items)
            case A.PartitionLit(ps):
                return TPartition(self.unify_all([x for p in ps for x in p], e))
            case A.UnaryOp(op, x):
                return self.unary(op, self.expr(x), e)
            case A.BinaryOp(op, l, r):
                return self.binary(op, self.expr(l), self.expr(r), e)
            case A.Call(name, args):
                return self.call(name, args, e)
            case A.Apply(f, args):
                return self.apply(self.expr(f), [self.expr(a) for a in args], e)
            case A.Index(base, indices):
                return self.index(self.expr(base), indices, e)
            case A.Quantified(kind, binders, body):
                return self.quantified(kind, binders, body, e)
            case A.Comprehension(head, clauses):
                return self.comprehension(head, clauses, e)
            case A.DomainExpr(d):
                return TDomain(self.domain(d))
        raise _err(f"unknown expression {e!r}")

    def ref(self, e: A.Ref) -> Type:
        t = self._local(e.name)
        if t is not None:
            return t
        s = self.table.get(e.name)
        if s is None:
            raise _err(f"{e.name} is used before it is declared", e)
        if s.kind == "enum-type":
            return TDomain(TEnum(e.name))
        if s.kind == "unnamed-type":
            return TDomain(TUnnamed(e.name))
        return s.type

    def unify_all(self, items, node) -> Type:
        t: Type = ANY
        for x in items:
            u = unify(t, self.expr(x))
            if u is None:
                raise _err("elements of a literal have different types", node)
            t = u
        return t

    def unary(self, op: str, t: Type, e) -> Type:
        match op:
            case "-" | "factorial":
                if isinstance(t, TInt):
                    return INT
                raise _err(f"{'negation' if op == '-' else 'factorial'} needs an integer, got {t}", e)
            case "!":
                if isinstance(t, TBool):
                    return BOOL
                raise _err(f"logical negation needs a Boolean, got {t}", e)
            case "||":
                if isinstance(t, (TInt, TSet, TMSet, TSequence, TFunction, TRelation,
                                  TPartition, TMatrix, TDomain)):
                    return INT
                raise _err(f"|...| is not defined for {t}", e)
        raise _err(f"unknown operator {op}", e)

    def binary(self, op: str, a: Type, b: Type, e) -> Type:
        match op:
            case "+" | "*" | "/" | "%" | "**":
                if isinstance(a, TInt) and isinstance(b, TInt):
                    return INT
                raise _err(f"{op} needs two integers, got {a} and {b}", e)
            case "-":
                if isinstance(a, TInt) and isinstance(b, TInt):
                    return INT
                if isinstance(a, (TSet, TMSet, TRelation)):
                    u = unify(a, b)
                    if u is not None:
                        return u
                raise _err(f"- needs two integers or two collections of one type, got {a} and {b}", e)
            case "=" | "!=":
                u = unify(a, b)
                if u is None:
                    raise _err(f"cannot compare {a} with {b}", e)
                if has_any(u):
                    raise _err("cannot infer the element type of an empty literal", e)
                return BOOL
            case "<" | "<=" | ">" | ">=":
                if isinstance(a, ORDERED) and unify(a, b) is not None:
                    return BOOL
                raise _err(f"{op} needs two integers, two Booleans or two members of one enum, "
                           f"got {a} and {b}", e)
            case "<lex" | "<=lex" | ">lex" | ">=lex":
                if isinstance(a, (TMatrix, TSequence)) and unify(a, b) is not None:
                    return BOOL
                raise _err(f"{op} needs two lists of the same type", e)
            case "/\\" | "\\/" | "->" | "<->":
                if isinstance(a, TBool) and isinstance(b, TBool):
                    return BOOL
                raise _err(f"{op} needs two Booleans, got {a} and {b}", e)
            case "in":
                el = _element_type(b)
                if el is None or unify(a, el) is None:
                    raise _err(f"`in` needs an element of {b}, got {a}", e)
                return BOOL
            case "subset" | "subsetEq" | "supset" | "supsetEq":
                if isinstance(a, (TSet, TMSet, TRelation)) and unify(a, b) is not None:
                    return BOOL
                raise _err(f"{op} needs two sets or two multi-sets of one type", e)
            case "union" | "intersect":
                if isinstance(a, (TSet, TMSet, TRelation)):
                    u = unify(a, b)
                    if u is not None:
                        return u
                raise _err(f"{op} needs two sets or two multi-sets of one type", e)
            case "subsequence" | "substring":
                if isinstance(a, TSequence) and unify(a, b) is not None:
                    return BOOL
                raise _err(f"{op} needs two sequences of one type", e)
        raise _err(f"unknown operator {op}", e)

    def call(self, name: str, args: tuple, e) -> Type:
        if name == "flatten" and len(args) == 2:
            if not isinstance(args[0], A.IntLit):
                raise _err("the depth argument of flatten must be an integer literal", e)
            m = self.expr(args[1])
            depth = args[0].value
            inner = m
            for _ in range(depth + 1):
                if not isinstance(inner, TMatrix):
                    raise _err("flatten depth exceeds the matrix dimension", e)
                inner = inner.element
            return m if depth == 0 else TMatrix(INT, inner)
        ts = [self.expr(a) for a in args]
        arity = {"max": (1, 2), "min": (1, 2), "flatten": (1, 2)}.get(name)
        want = arity or (_ARITY.get(name, 1),)
        if len(ts) not in want:
            raise _err(f"{name} takes {' or '.join(map(str, want))} argument(s)", e)
        bad = _err(f"{name} cannot be applied to {', '.join(map(str, ts))}", e)
        t0 = ts[0]
        match name:
            case "toInt":
                if isinstance(t0, TBool):
                    return INT
            case "toSet" | "toMSet":
                el = _collection_element(t0)
                if el is not None:
                    return TSet(el) if name == "toSet" else TMSet(el)
            case "toRelation":
                if isinstance(t0, TFunction):
                    return TRelation((t0.source, t0.target))
            case "defined" | "range":
                f = _as_function_type(t0)
                if f is not None:
                    return TSet(f.source if name == "defined" else f.target)
            case "image" | "imageSet":
                f = _as_function_type(t0)
                if f is not None:
                    if unify(f.source, ts[1]) is not None:
                        return f.target if name == "image" else TSet(f.target)
                    if isinstance(ts[1], TSet) and unify(f.source, ts[1].element) is not None:
                        raise _err("taking the image of a function with respect to a set "
                                   "is not supported", e)
            case "preImage":
                f = _as_function_type(t0)
                if f is not None and unify(f.target, ts[1]) is not None:
                    return TSet(f.source)
            case "inverse":
                f, g = _as_function_type(t0), _as_function_type(ts[1])
                if f is not None and g is not None and unify(f.source, g.target) is not None \
                        and unify(f.target, g.source) is not None:
                    return BOOL
            case "restrict":
                f = _as_function_type(t0)
                if f is not None and isinstance(ts[1], TDomain) and \
                        unify(f.source, ts[1].element) is not None:
                    return t0
            case "freq":
                el = _list_element(t0)
                if el is not None and unify(el, ts[1]) is not None:
                    return INT
            case "hist":
                el = _list_element(t0)
                if el is not None:
                    return TSet(TTuple((el, INT)))
            case "max" | "min":
                if len(ts) == 2:
                    if isinstance(t0, ORDERED) and unify(t0, ts[1]) is not None:
                        return t0
                else:
                    el = _element_type(t0)
                    if el is not None and isinstance(el, ORDERED):
                        return el
            case "pred" | "succ":
                if isinstance(t0, ORDERED):
                    return t0
            case "allDiff":
                if isinstance(t0, (TMatrix, TSequence)):
                    return BOOL
            case "alldifferent_except":
                el = _list_element(t0)
                if el is not None and unify(el, ts[1]) is not None:
                    return BOOL
            case "flatten":
                inner = t0
                if isinstance(inner, TMatrix):
                    while isinstance(inner, TMatrix):
                        inner = inner.element
                    return TMatrix(INT, inner)
            case "powerSet":
                if isinstance(t0, TSet):
                    return TSet(t0)
            case "party":
                if isinstance(ts[1], TPartition) and unify(ts[1].element, t0) is not None:
                    return TSet(ts[1].element)
            case "parts":
                if isinstance(t0, TPartition):
                    return TSet(TSet(t0.element))
            case "participants":
                if isinstance(t0, TPartition):
                    return TSet(t0.element)
            case "apart" | "together":
                el = _collection_element(t0)
                if isinstance(ts[1], TPartition) and el is not None and \
                        unify(el, ts[1].element) is not None:
                    return BOOL
            case "subsequence" | "substring":
                if isinstance(t0, TSequence) and unify(t0, ts[1]) is not None:
                    return BOOL
            case "sum" | "product":
                el = _collection_element(t0)
                if el is not None and isinstance(unify(el, INT), TInt):
                    return INT
            case "and" | "or" | "xor":
                el = _collection_element(t0)
                if el is not None and isinstance(unify(el, BOOL), TBool):
                    return BOOL
            case "factorial":
                if isinstance(t0, TInt):
                    return INT
        raise bad

    def apply(self, f: Type, args: list[Type], e) -> Type:
        key = args[0] if len(args) == 1 else TTuple(tuple(args))
        if isinstance(f, TFunction):
            if unify(f.source, key) is None:
                if isinstance(key, TSet) and unify(f.source, key.element) is not None:
                    raise _err("taking the image of a function with respect to a set "
                               "is not supported", e)
                raise _err(f"function from {f.source} applied to {key}", e)
            return f.target
        if isinstance(f, TSequence):
            if not isinstance(key, TInt):
                raise _err("sequences are applied to integers", e)
            return f.element
        raise _err(f"{f} cannot be applied", e)

    def index(self, t: Type, indices: tuple, e) -> Type:
        for ix in indices:
            match t:
                case TMatrix(it, el):
                    if unify(it, self.expr(ix)) is None:
                        raise _err(f"matrix index has type {self.expr(ix)}, expected {it}", e)
                    t = el
                case TTuple(items):
                    if not isinstance(ix, A.IntLit):
                        raise _err("tuples are indexed by a constant integer", e)
                    if not 1 <= ix.value <= len(items):
                        raise _err(f"tuple index {ix.value} outside 1..{len(items)}", e)
                    t = items[ix.value - 1]
                case TRecord(fs) | TVariant(fs):
                    if not isinstance(ix, A.Ref) or ix.name not in dict(fs):
                        raise _err("records and variants are indexed by a field name", e)
                    t = dict(fs)[ix.name]
                case TSequence(el):
                    if not isinstance(self.expr(ix), TInt):
                        raise _err("sequences are indexed by integers", e)
                    t = el
                case _:
                    raise _err(f"{t} cannot be indexed", e)
        return t

    def _bind(self, pattern: A.Pattern, t: Type, node) -> None:
        if isinstance(pattern, A.NamePattern):
            self.bind_local(pattern.name, t, node)
            return
        if not isinstance(t, TTuple) or len(t.items) != len(pattern.items):
            raise _err(f"tuple pattern does not match {t}", node)
        for p, x in zip(pattern.items, t.items):
            self._bind(p, x, node)

    def _source(self, how: str, source: object, node) -> Type:
        if how == ":":
            return self.domain(source)
        t = self.expr(source)
        el = _element_type(t)
        if el is None:
            raise _err(f"cannot iterate over {t}", node)
        return el

    def quantified(self, kind: str, binders: tuple, body, e) -> Type:
        self.locals.append({})
        try:
            for b in binders:
                el = self._source(b.how, b.source, e)
                for p in b.patterns:
                    self._bind(p, el, e)
            t = self.expr(body)
        finally:
            self.locals.pop()
        want = BOOL if kind in ("forAll", "exists") else INT
        if type(t) is not type(want):
            raise _err(f"the body of {kind} must be {want}, got {t}", e)
        return want

    def comprehension(self, head, clauses, e) -> Type:
        self.locals.append({})
        try:
            for c in clauses:
                if isinstance(c, A.Condition):
                    if not isinstance(self.expr(c.expr), TBool):
                        raise _err("comprehension conditions must be Boolean", c.expr)
                else:
                    el = self._source(":" if c.how == ":" else "in", c.source, e)
                    self._bind(c.pattern, el, e)
            t = self.expr(head)
        finally:
            self.locals.pop()
        return TMatrix(INT, t)


_ARITY = {
    "image": 2, "imageSet": 2, "preImage": 2, "inverse": 2, "restrict": 2, "freq": 2,
    "alldifferent_except": 2, "party": 2, "apart": 2, "together": 2,
    "subsequence": 2, "substring": 2,
}


def _range_exprs(r: A.Range) -> list:
    match r:
        case A.Single(x) | A.From(x) | A.To(x):
            return [x]
        case A.Bounded(lo, hi):
            return [lo, hi]
    return []


def _distinct(names: list[str], what: str) -> None:
    if len(set(names)) != len(names):
        raise _err(f"{what} names must be distinct")


def _int_collection(t: Type) -> bool:
    el = _collection_element(t)
    return el is not None and isinstance(unify(el, INT), TInt)


def _collection_element(t: Type) -> Type | None:
    match t:
        case TSet(e) | TMSet(e) | TSequence(e) | TMatrix(_, e):
            return e
        case TFunction(s, x):
            return TTuple((s, x))
        case TRelation(cs):
            return TTuple(cs)
    return None


def _element_type(t: Type) -> Type | None:
    """What `x in t` and `forAll x in t` range over."""
    match t:
        case TDomain(e):
            return e
        case TPartition(e):
            return TSet(e)
    return _collection_element(t)


def _list_element(t: Type) -> Type | None:
    match t:
        case TMSet(e) | TMatrix(_, e) | TSequence(e) | TSet(e):
            return e
    return None


def _as_function_type(t: Type) -> TFunction | None:
    if isinstance(t, TFunction):
        return t
    if isinstance(t, TSequence):
        return TFunction(INT, t.element)
    return None


def type_of_value(v: object) -> Type:
    match v:
        case bool():
            return BOOL
        case int():
            return INT
        case EnumV():
            return TEnum(v.type.name)
        case UnnamedV():
            return TUnnamed(v.type.name)
        case TupleV():
            return TTuple(tuple(type_of_value(x) for x in v.items))
        case RecordV():
            return TRecord(tuple((n, type_of_value(x)) for n, x in v.fields))
        case VariantV():
            return TVariant(((v.name, type_of_value(v.value)),), True)
        case MatrixV():
            it = type_of_value(v.index[0]) if v.index else INT
            return TMatrix(it, _join(type_of_value(x) for x in v.entries))
        case SetV():
            return TSet(_join(type_of_value(x) for x in v.items))
        case MSetV():
            return TMSet(_join(type_of_value(x) for x in v.items))
        case FunctionV():
            return TFunction(_join(type_of_value(k) for k, _ in v.pairs),
                             _join(type_of_value(x) for _, x in v.pairs))
        case SequenceV():
            return TSequence(_join(type_of_value(x) for x in v.items))
        case RelationV():
            t = _join(type_of_value(x) for x in v.items)
            return TRelation(t.items if isinstance(t, TTuple) else (ANY,))
        case PartitionV():
            return TPartition(_join(type_of_value(x) for p in v.parts for x in p.items))
    raise TypeCheckError(f"not a value: {v!r}")


def _join(ts) -> Type:
    out: Type = ANY
    for t in ts:
        u = unify(out, t)
        if u is None:
            raise TypeCheckError("value mixes element types")
        out = u
    return out


# ---------------------------------------------------------------- entry points

def type_of_domain(d: A.Domain, symbols: SymbolTable) -> Type:
    return Checker(symbols).domain(d)


def type_of(e: A.Expr, symbols: SymbolTable | None = None) -> Type:
    return Checker(symbols).expr(e)


def check_model(m: A.Model) -> Checked:
    """Check a whole model in statement order; the first problem raises."""
    c = Checker()
    tab = c.table
    types: list[tuple[A.Expr, Type]] = []
    seen_objective = seen_branching = False
    for s in m.statements:
        match s:
            case A.Find(names, d):
                t = c.domain(d)
                if c.mentions_decision(d):
                    raise _err("domains of decision variables cannot refer to decision variables")
                for n in names:
                    tab.declare(n, "find", t, decision=True)
            case A.Given(names, d):
                t = c.domain(d)
                if c.mentions_decision(d):
                    raise _err("domains of parameters cannot refer to decision variables")
                for n in names:
                    tab.declare(n, "given", t)
            case A.LettingExpr(name, e):
                t = c.expr(e)
                tab.declare(name, "letting-expr", t, decision=c.mentions_decision(e))
            case A.LettingDomain(name, d):
                t = c.domain(d)
                if c.mentions_decision(d):
                    raise _err("domains cannot refer to decision variables")
                tab.declare(name, "letting-domain", TDomain(t))
            case A.GivenEnum(name):
                tab.declare(name, "enum-type", TEnum(name))
            case A.LettingEnum(name, members):
                _distinct(list(members), "enum member")
                tab.declare(name, "enum-type", TEnum(name))
                for x in members:
                    tab.declare(x, "enum-member", TEnum(name))
            case A.LettingUnnamed(name, size):
                if not isinstance(c.expr(size), TInt):
                    raise _err("the size of an unnamed type must be an integer", size)
                tab.declare(name, "unnamed-type", TUnnamed(name))
            case A.SuchThat(exprs):
                for e in exprs:
                    t = c.expr(e)
                    if not isinstance(t, TBool):
                        raise _err(f"constraints must be Boolean, got {t}", e)
                    types.append((e, t))
            case A.Where(exprs):
                for e in exprs:
                    t = c.expr(e)
                    if not isinstance(t, TBool):
                        raise _err(f"where clauses must be Boolean, got {t}", e)
                    if c.mentions_decision(e):
                        raise _err("where clauses cannot refer to decision variables", e)
                    types.append((e, t))
            case A.Objective(sense, e):
                if seen_objective:
                    raise _err("a model has at most one objective")
                seen_objective = True
                t = c.expr(e)
                if isinstance(t, TBool):
                    raise _err("the objective must be an integer expression; "
                               "use toInt(...) for a Boolean", e)
                if not isinstance(t, TInt):
                    raise _err(f"the objective must be an integer expression, got {t}", e)
                types.append((e, t))
            case A.Branching(items):
                if seen_branching:
                    raise _err("a model has at most one branching statement")
                seen_branching = True
                for x in items:
                    t = c.expr(x)
                    types.append((x, t))
    return Checked(tab, types)
