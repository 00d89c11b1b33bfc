"""Pretty-printing of models, domains, expressions, values and solutions.

Layout uses a small Wadler-style document algebra: a group is printed flat
when it fits in the remaining width and broken at its line points otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from . import ast as A
from .values import (EnumV, FunctionV, MatrixV, MSetV, PartitionV, RecordV,
                     RelationV, SequenceV, SetV, TupleV, UnnamedV, Value,
                     VariantV, vkey)


@dataclass(frozen=True)
class PrintConfig:
    line_width: int = 120
    normalise_quantified: bool = False
    remove_unused: bool = False
    emit_visualisation_comments: bool = True

    def __post_init__(self) -> None:
        if self.line_width < 20:
            raise ValueError("line width must be at least 20")


# ---------------------------------------------------------------- documents

@dataclass(frozen=True)
class Text:
    s: str


@dataclass(frozen=True)
class Line:
    flat: str = " "  # what the line becomes when its group fits


@dataclass(frozen=True)
class Cat:
    parts: tuple


@dataclass(frozen=True)
class Nest:
    indent: int
    doc: object


@dataclass(frozen=True)
class Group:
    doc: object


def cat(*parts) -> Cat:
    return Cat(tuple(Text(p) if isinstance(p, str) else p for p in parts))


LINE = Line()
SOFT = Line("")


def join(sep, docs: Iterable) -> Cat:
    out: list = []
    for i, d in enumerate(docs):
        if i:
            out.append(sep)
        out.append(d)
    return cat(*out)


def bracketed(open_: str, items: list, close: str, tail=None) -> Group:
    """`open item, item, ... close` filling lines greedily when broken."""
    if not items:
        return Group(cat(open_, tail or "", close))
    body: list = [items[0]]
    for it in items[1:]:
        body.append(Text(","))
        body.append(Group(cat(LINE, it)))
    if tail is not None:
        body.append(Group(cat(";", LINE, tail)))
    return Group(cat(open_, Nest(len(open_), cat(*body)), close))


def render(doc, width: int) -> str:
    out: list[str] = []
    col = 0
    stack: list[tuple[int, bool, object]] = [(0, False, doc)]
    while stack:
        ind, flat, d = stack.pop()
        match d:
            case Text(s):
                out.append(s)
                col += len(s)
            case Line(f):
                if flat:
                    out.append(f)
                    col += len(f)
                else:
                    out.append("\n" + " " * ind)
                    col = ind
            case Cat(parts):
                for p in reversed(parts):
                    stack.append((ind, flat, p))
            case Nest(i, inner):
                stack.append((ind + i, flat, inner))
            case Group(inner):
                if flat or _fits(width - col, [(ind, True, inner)] + stack[::-1]):
                    stack.append((ind, True, inner))
                else:
                    stack.append((ind, False, inner))
    return "".join(out)


def _fits(room: int, items: list) -> bool:
    # items: work list in order; stop at the first line break in break mode
    work = list(reversed(items))
    while work and room >= 0:
        ind, flat, d = work.pop()
        match d:
            case Text(s):
                room -= len(s)
            case Line(f):
                if flat:
                    room -= len(f)
                else:
                    return True
            case Cat(parts):
                for p in reversed(parts):
                    work.append((ind, flat, p))
            case Nest(i, inner):
                work.append((ind + i, flat, inner))
            case Group(inner):
                work.append((ind, flat, inner))
    return room >= 0


# ---------------------------------------------------------------- precedence

SHARED, SETOP, ADD, MUL, UNARY, POWER, POSTFIX, ATOM = range(1, 9)
QUANT = 0

_TIER = {"+": ADD, "-": ADD, "*": MUL, "/": MUL, "%": MUL, "**": POWER,
         "intersect": SETOP, "union": SETOP}


def tier(e: A.Expr) -> int:
    match e:
        case A.BinaryOp(op, _, _):
            return _TIER.get(op, SHARED)
        case A.UnaryOp("-" | "!", _):
            return UNARY
        case A.UnaryOp("factorial", _) | A.Index() | A.Apply():
            return POSTFIX
        case A.Quantified():
            return QUANT
        case A.IntLit(v) if v < 0:
            return UNARY
        case A.Const(v) if isinstance(v, int) and not isinstance(v, bool) and v < 0:
            return UNARY
        case A.DomainExpr():
            return ATOM
    return ATOM


# ---------------------------------------------------------------- expressions

def expr_doc(e: A.Expr, need: int = QUANT):
    d = _expr_doc(e)
    if tier(e) < need:
        return cat("(", Nest(1, d), ")")
    return d


def _list(items) -> list:
    return [expr_doc(x) for x in items]


def _expr_doc(e: A.Expr):
    match e:
        case A.IntLit(v):
            return Text(str(v))
        case A.BoolLit(v):
            return Text("true" if v else "false")
        case A.Const(v):
            return _expr_doc(value_expr(v))
        case A.Ref(n):
            return Text(n)
        case A.MatrixLit(items, index):
            return bracketed("[", _list(items), "]",
                             domain_doc(index) if index is not None else None)
        case A.SetLit(items):
            return bracketed("{", _list(items), "}")
        case A.MSetLit(items):
            return bracketed("mset(", _list(items), ")")
        case A.TupleLit(items):
            if len(items) >= 2:
                return bracketed("(", _list(items), ")")
            return bracketed("tuple(", _list(items), ")")
        case A.RecordLit(fields):
            return bracketed("record {", [cat(f"{n} = ", expr_doc(x, SETOP)) for n, x in fields], "}")
        case A.VariantLit(n, x):
            return cat(f"variant {{{n} = ", expr_doc(x, SETOP), "}")
        case A.FunctionLit(pairs):
            return bracketed("function(", [cat(expr_doc(a, SHARED + 1), " --> ", expr_doc(b, SHARED + 1))
                                           for a, b in pairs], ")")
        case A.SequenceLit(items):
            return bracketed("sequence(", _list(items), ")")
        case A.RelationLit(items):
            return bracketed("relation(", _list(items), ")")
        case A.PartitionLit(parts):
            return bracketed("partition(", [bracketed("{", _list(p), "}") for p in parts], ")")
        case A.UnaryOp("-", x):
            return cat("-", expr_doc(x, UNARY))
        case A.UnaryOp("!", x):
            return cat("!", expr_doc(x, UNARY))
        case A.UnaryOp("factorial", x):
            return cat(expr_doc(x, POSTFIX), "!")
        case A.UnaryOp("||", x):
            return cat("|", expr_doc(x), "|")
        case A.BinaryOp("**", a, b):
            return cat(expr_doc(a, POSTFIX), "**", expr_doc(b, UNARY))
        case A.BinaryOp(op, a, b):
            return _binary_doc(e)
        case A.Call(name, args):
            return bracketed(f"{name}(", _list(args), ")")
        case A.Apply(f, args):
            return cat(expr_doc(f, POSTFIX), bracketed("(", _list(args), ")"))
        case A.Index(base, idx):
            return cat(expr_doc(base, POSTFIX), bracketed("[", _list(idx), "]"))
        case A.Quantified(kind, binders, body):
            head = join(Text(", "), [_binder_doc(b) for b in binders])
            return Group(cat(f"{kind} ", head, " .", Nest(2, cat(LINE, expr_doc(body)))))
        case A.Comprehension(head, clauses):
            cl = [_clause_doc(c) for c in clauses]
            return Group(cat("[", Nest(1, cat(expr_doc(head), LINE, "| ",
                                               Nest(2, join(cat(",", LINE), cl)))), "]"))
        case A.DomainExpr(d):
            return domain_doc(d)
    raise TypeError(f"cannot print {e!r}")


def _binary_doc(e: A.BinaryOp):
    op = e.op
    t = tier(e)
    # a left-leaning chain of one operator reprints without parentheses
    operands = [e.right]
    left = e.left
    while isinstance(left, A.BinaryOp) and left.op == op:
        operands.append(left.right)
        left = left.left
    operands.append(left)
    operands.reverse()

    def operand(x, first: bool):
        if t == SHARED and isinstance(x, A.BinaryOp) and tier(x) == SHARED:
            return cat("(", Nest(1, _expr_doc(x)), ")")
        return expr_doc(x, t if first else t + 1)

    parts = [operand(operands[0], True)]
    for x in operands[1:]:
        parts.append(cat(LINE, f"{op} ", operand(x, False)))
    return Group(cat(parts[0], Nest(2, cat(*parts[1:]))))


def _pattern(p: A.Pattern) -> str:
    match p:
        case A.NamePattern(n):
            return n
        case A.TuplePattern(items):
            return "(" + ", ".join(_pattern(x) for x in items) + ")"
    raise TypeError(p)


def _binder_doc(b: A.Binder):
    names = ", ".join(_pattern(p) for p in b.patterns)
    if b.how == ":":
        return cat(f"{names} : ", domain_doc(b.source))
    return cat(f"{names} in ", expr_doc(b.source, SHARED + 1))


def _clause_doc(c):
    match c:
        case A.Generator(p, ":", d):
            return cat(f"{_pattern(p)} : ", domain_doc(d))
        case A.Generator(p, "<-", src):
            return cat(f"{_pattern(p)} <- ", expr_doc(src))
        case A.Condition(x):
            return expr_doc(x)
    raise TypeError(c)


# ---------------------------------------------------------------- domains

def _range_doc(r: A.Range):
    match r:
        case A.Single(x):
            return expr_doc(x, SHARED + 1)
        case A.From(lo):
            return cat(expr_doc(lo, SHARED + 1), "..")
        case A.To(hi):
            return cat("..", expr_doc(hi, SHARED + 1))
        case A.Bounded(lo, hi):
            return cat(expr_doc(lo, SHARED + 1), "..", expr_doc(hi, SHARED + 1))
        case A.Open():
            return Text("..")
    raise TypeError(r)


def _attrs_doc(attrs: A.Attrs):
    if not attrs:
        return Text("")
    items = [Text(n) if v is None else cat(f"{n} ", expr_doc(v, SHARED + 1)) for n, v in attrs]
    return cat(" ", bracketed("(", items, ")"))


def domain_doc(d: A.Domain):
    match d:
        case A.BoolDomain():
            return Text("bool")
        case A.IntDomain(ranges):
            return bracketed("int(", [_range_doc(r) for r in ranges], ")") if ranges else Text("int")
        case A.IntFromSet(x):
            return cat("int(", expr_doc(x), ")")
        case A.EnumDomain(n, ranges):
            return bracketed(f"{n}(", [_range_doc(r) for r in ranges], ")") if ranges else Text(n)
        case A.UnnamedDomain(n) | A.DomainAlias(n):
            return Text(n)
        case A.TupleDomain(comps):
            return bracketed("tuple(", [domain_doc(c) for c in comps], ")")
        case A.RecordDomain(fields):
            return bracketed("record {", [cat(f"{n} : ", domain_doc(x)) for n, x in fields], "}")
        case A.VariantDomain(fields):
            return bracketed("variant {", [cat(f"{n} : ", domain_doc(x)) for n, x in fields], "}")
        case A.MatrixDomain(indices, el):
            return Group(cat("matrix indexed by ", bracketed("[", [domain_doc(i) for i in indices], "]"),
                             " of", Nest(2, cat(LINE, domain_doc(el)))))
        case A.SetDomain(attrs, el):
            return cat("set", _attrs_doc(attrs), " of ", domain_doc(el))
        case A.MSetDomain(attrs, el):
            return cat("mset", _attrs_doc(attrs), " of ", domain_doc(el))
        case A.SequenceDomain(attrs, el):
            return cat("sequence", _attrs_doc(attrs), " of ", domain_doc(el))
        case A.FunctionDomain(attrs, src, tgt):
            return Group(cat("function", _attrs_doc(attrs), " ", domain_doc(src), " -->",
                             Nest(2, cat(LINE, domain_doc(tgt)))))
        case A.RelationDomain(attrs, comps):
            return cat("relation", _attrs_doc(attrs), " of (",
                       join(Text(" * "), [domain_doc(c) for c in comps]), ")")
        case A.PartitionDomain(attrs, el):
            return cat("partition", _attrs_doc(attrs), " from ", domain_doc(el))
    raise TypeError(f"cannot print domain {d!r}")


# ---------------------------------------------------------------- values

def _int_expr(n: int) -> A.Expr:
    return A.IntLit(n) if n >= 0 else A.UnaryOp("-", A.IntLit(-n))


def index_domain_ast(index: tuple) -> A.Domain:
    """A domain describing a matrix's index values, for `[...; D]` annotations."""
    if index and all(isinstance(i, bool) for i in index):
        return A.BoolDomain()
    if all(isinstance(i, int) and not isinstance(i, bool) for i in index):
        ranges: list[A.Range] = []
        run: list[int] = []
        for i in list(index) + [None]:
            if run and (i is None or i != run[-1] + 1):
                lo, hi = run[0], run[-1]
                ranges.append(A.Bounded(_int_expr(lo), _int_expr(hi)) if hi > lo
                              else A.Single(_int_expr(lo)))
                run = []
            if i is not None:
                run.append(i)
        if len(ranges) == 1 and isinstance(ranges[0], A.Single):
            return A.IntDomain((A.Bounded(ranges[0].value, ranges[0].value),))
        return A.IntDomain(tuple(ranges))
    if all(isinstance(i, EnumV) for i in index):
        t = index[0].type
        if [i.index for i in index] == list(range(1, len(t.members) + 1)):
            return A.EnumDomain(t.name, ())
        lo, hi = index[0], index[-1]
        if [i.index for i in index] == list(range(lo.index, hi.index + 1)):
            return A.EnumDomain(t.name, (A.Bounded(A.Ref(lo.name), A.Ref(hi.name)),))
        return A.EnumDomain(t.name, tuple(A.Single(A.Ref(i.name)) for i in index))
    if all(isinstance(i, UnnamedV) for i in index):
        return A.UnnamedDomain(index[0].type.name)
    raise ValueError("matrix index values have mixed kinds")


def value_expr(v: Value) -> A.Expr:
    """Express a value as literal syntax."""
    match v:
        case True | False:
            return A.BoolLit(v)
        case int():
            return _int_expr(v)
        case EnumV() | UnnamedV():
            return A.Ref(v.name)
        case TupleV():
            return A.TupleLit(tuple(value_expr(x) for x in v.items))
        case RecordV():
            return A.RecordLit(tuple((n, value_expr(x)) for n, x in v.fields))
        case VariantV():
            return A.VariantLit(v.name, value_expr(v.value))
        case MatrixV():
            idx = v.index_domain if v.index_domain is not None else index_domain_ast(v.index)
            return A.MatrixLit(tuple(value_expr(x) for x in v.entries), idx)
        case SetV():
            return A.SetLit(tuple(value_expr(x) for x in v.items))
        case MSetV():
            return A.MSetLit(tuple(value_expr(x) for x in v.items))
        case FunctionV():
            return A.FunctionLit(tuple((value_expr(a), value_expr(b)) for a, b in v.pairs))
        case SequenceV():
            return A.SequenceLit(tuple(value_expr(x) for x in v.items))
        case RelationV():
            return A.RelationLit(tuple(value_expr(x) for x in v.items))
        case PartitionV():
            return A.PartitionLit(tuple(tuple(value_expr(x) for x in p.items) for p in v.parts))
    raise TypeError(f"not a value: {v!r}")


# ---------------------------------------------------------------- statements

def statement_doc(s: A.Statement):
    match s:
        case A.Find(names, d):
            return Group(cat(f"find {', '.join(names)} :", Nest(4, cat(LINE, domain_doc(d)))))
        case A.Given(names, d):
            return Group(cat(f"given {', '.join(names)} :", Nest(4, cat(LINE, domain_doc(d)))))
        case A.LettingExpr(n, x):
            return Group(cat(f"letting {n} be", Nest(2, cat(LINE, expr_doc(x)))))
        case A.LettingDomain(n, d):
            return Group(cat(f"letting {n} be domain", Nest(2, cat(LINE, domain_doc(d)))))
        case A.GivenEnum(n):
            return Text(f"given {n} new type enum")
        case A.LettingEnum(n, members):
            return cat(f"letting {n} be new type enum ", bracketed("{", [Text(m) for m in members], "}"))
        case A.LettingUnnamed(n, size):
            return cat(f"letting {n} be new type of size ", expr_doc(size))
        case A.SuchThat(exprs) | A.Where(exprs):
            kw = "such that" if isinstance(s, A.SuchThat) else "where"
            body = join(cat(",", Line()), [expr_doc(x) for x in exprs])
            return cat(kw, Nest(4, cat(Line(), body)))
        case A.Branching(items):
            return cat("branching on ", bracketed("[", _list(items), "]"))
        case A.Objective(sense, x):
            return Group(cat(sense, Nest(4, cat(LINE, expr_doc(x)))))
    raise TypeError(s)


def print_expr(e: A.Expr, width: int = 120) -> str:
    return render(expr_doc(e), width)


def print_domain(d: A.Domain, width: int = 120) -> str:
    return render(domain_doc(d), width)


def print_value(v: Value, width: int = 120) -> str:
    return render(expr_doc(value_expr(v)), width)


def print_statement(s: A.Statement, width: int = 120) -> str:
    return render(statement_doc(s), width)


def print_model(m: A.Model, cfg: PrintConfig = PrintConfig()) -> str:
    if cfg.remove_unused:
        m = remove_unused(m)
    if cfg.normalise_quantified:
        m = normalise_quantified(m)
    lines = []
    if m.language is not None:
        lines.append(f"language Essence {m.language[0]}.{m.language[1]}")
    lines.extend(print_statement(s, cfg.line_width) for s in m.statements)
    return "\n".join(lines) + "\n" if lines else ""


def print_solution(solution: Iterable[tuple[str, Value]], cfg: PrintConfig = PrintConfig()) -> str:
    out = []
    for name, v in sorted(solution, key=lambda nv: nv[0]):
        out.append(print_statement(A.LettingExpr(name, value_expr(v)), cfg.line_width))
        if cfg.emit_visualisation_comments and _is_2d(v):
            out.append(f"$ Visualisation for {name}")
            for row in v.entries:
                out.append("$ " + " ".join(_cell(x) for x in row.entries))
    return "\n".join(out) + "\n" if out else ""


def _is_2d(v: Value) -> bool:
    return (isinstance(v, MatrixV) and len(v.entries) > 0
            and all(isinstance(r, MatrixV) for r in v.entries)
            and all(not isinstance(x, MatrixV) for r in v.entries for x in r.entries))


def _cell(x: Value) -> str:
    if x is True:
        return "T"
    if x is False:
        return "_"
    return render(expr_doc(value_expr(x)), 10**6)


# ---------------------------------------------------------------- transforms

def _declared(s: A.Statement) -> list[str]:
    match s:
        case A.Find(names, _) | A.Given(names, _):
            return list(names)
        case A.LettingExpr(n, _) | A.LettingDomain(n, _) | A.LettingUnnamed(n, _) | A.GivenEnum(n):
            return [n]
        case A.LettingEnum(n, members):
            return [n, *members]
    return []


def remove_unused(m: A.Model) -> A.Model:
    """Drop lettings and finds that nothing else refers to, until stable.

    Givens stay: parameter files bind them regardless of use.
    """
    stmts = list(m.statements)
    while True:
        used: list[set[str]] = [A.referenced_names(s) - set(_declared(s)) for s in stmts]
        keep = []
        changed = False
        for i, s in enumerate(stmts):
            names = _declared(s)
            removable = isinstance(s, (A.Find, A.LettingExpr, A.LettingDomain,
                                       A.LettingEnum, A.LettingUnnamed))
            others = set().union(*(u for j, u in enumerate(used) if j != i)) if len(used) > 1 else set()
            if removable and names and not (set(names) & others):
                changed = True
                continue
            keep.append(s)
        stmts = keep
        if not changed:
            return replace(m, statements=tuple(stmts))


def normalise_quantified(m: A.Model) -> A.Model:
    """Rename quantified variables to q1, q2, ... in binder order."""
    taken = set()
    for n in A.walk(m):
        match n:
            case A.Ref(x) | A.NamePattern(x):
                taken.add(x)
    for s in m.statements:
        taken.update(_declared(s))
    counter = [0]

    def fresh() -> str:
        while True:
            counter[0] += 1
            cand = f"q{counter[0]}"
            if cand not in taken:
                return cand

    def pat(p: A.Pattern, env: dict) -> A.Pattern:
        match p:
            case A.NamePattern(x):
                new = fresh()
                env[x] = new
                return A.NamePattern(new)
            case A.TuplePattern(items):
                return A.TuplePattern(tuple(pat(i, env) for i in items))
        raise TypeError(p)

    def go(node, env: dict):
        match node:
            case A.Ref(x):
                return A.Ref(env.get(x, x))
            case A.Quantified(kind, binders, body):
                inner = dict(env)
                nbs = []
                for b in binders:
                    src = go(b.source, inner)
                    pats = tuple(pat(p, inner) for p in b.patterns)
                    nbs.append(A.Binder(pats, b.how, src))
                return A.Quantified(kind, tuple(nbs), go(body, inner))
            case A.Comprehension(head, clauses):
                inner = dict(env)
                ncl = []
                for c in clauses:
                    if isinstance(c, A.Generator):
                        src = go(c.source, inner)
                        ncl.append(A.Generator(pat(c.pattern, inner), c.how, src))
                    else:
                        ncl.append(A.Condition(go(c.expr, inner)))
                return A.Comprehension(go(head, inner), tuple(ncl))
            case A.Const():
                return node
            case tuple():
                return tuple(go(x, env) for x in node)
        if hasattr(node, "__dataclass_fields__"):
            kwargs = {f: go(getattr(node, f), env) for f in node.__dataclass_fields__}
            return type(node)(**kwargs)
        return node

    return A.Model(tuple(go(s, {}) for s in m.statements), m.language)
