"""Evaluation of expressions and domains over an environment.

The same code runs in two modes. With every name bound to a ground value it
computes a value. When the solver binds decision variables to views the
result may instead be a :class:`~essence.symbolic.Sym`, which the solver
compiles and evaluates against partial assignments.

Integers are exact while an expression is being computed and are range
checked when they land somewhere: a container, a binding, or the final
result. This keeps guards such as ``2**i <= n`` meaningful for large ``i``.
"""

from __future__ import annotations

import math
from collections import Counter
from itertools import combinations
from typing import Callable, Iterator

from . import ast as A
from .domains import (GBool, GEnum, GFunction, GInt, GMatrix, GMSet, GPartition,
                      GRecord, GRelation, GroundDomain, GSequence, GSet, GTuple,
                      GUnnamed, GVariant)
from .errors import EvalError
from .symbolic import (IN, SYMBOLIC, AndSym, FunctionView, IfSym, MatrixView,
                       NeedsConcrete, OrSym, RecordView, SetView, Sym, TupleView,
                       View, lift, to_sym)
from .values import (EnumDef, EnumV, FunctionV, MatrixV, MSetV, PartitionV,
                     RecordV, RelationV, SequenceV, SetV, TupleV, UnnamedDef,
                     Value, VariantV, check_int, show, vkey)

# power and factorial refuse to build integers wider than this many bits
_MAX_BITS = 4096


class Lazy:
    """A letting whose value depends on decision variables."""
    __slots__ = ("expr",)

    def __init__(self, expr: A.Expr) -> None:
        self.expr = expr


class Env:
    """Layered name bindings. Quantified variables live in child layers."""
    __slots__ = ("vars", "parent", "root", "cache")

    def __init__(self, vars: dict | None = None, parent: Env | None = None) -> None:
        self.vars = dict(vars) if vars else {}
        self.parent = parent
        self.root = parent.root if parent is not None else self
        self.cache: dict | None = {} if parent is None else None

    def lookup(self, name: str) -> object:
        env = self
        while env is not None:
            v = env.vars.get(name, _MISSING)
            if v is not _MISSING:
                return v
            env = env.parent
        raise EvalError("unbound-name", f"{name} is not bound")

    def __contains__(self, name: str) -> bool:
        env = self
        while env is not None:
            if name in env.vars:
                return True
            env = env.parent
        return False

    def bind(self, name: str, value: object) -> None:
        self.vars[name] = value

    def child(self, vars: dict | None = None) -> Env:
        return Env(vars, self)

    def rebind(self, vars: dict) -> Env:
        """A fresh top-level env with some names replaced (lazy caches reset)."""
        flat: dict = {}
        chain = []
        env = self
        while env is not None:
            chain.append(env.vars)
            env = env.parent
        for layer in reversed(chain):
            flat.update(layer)
        flat.update(vars)
        return Env(flat)


_MISSING = object()


# ---------------------------------------------------------------- helpers

def _chk(v: Value) -> Value:
    if type(v) is int:
        check_int(v)
    return v


def materialize(v: Value) -> Value:
    if type(v) is int:
        return check_int(v)
    return v


def _kind(msg: str) -> EvalError:
    return EvalError("type-mismatch", msg)


def _is_int(x: object) -> bool:
    return type(x) is int


def _symbolic(*xs) -> bool:
    for x in xs:
        if isinstance(x, SYMBOLIC):
            return True
    return False


def _strict(fn: Callable, *args) -> object:
    for a in args:
        if isinstance(a, SYMBOLIC):
            return lift(fn, *args)
    return fn(*args)


def elements(c: object) -> list:
    """The members of a collection value, in canonical or list order."""
    match c:
        case SetV() | MSetV() | SequenceV() | RelationV():
            return list(c.items)
        case MatrixV():
            return list(c.entries)
        case FunctionV():
            return [TupleV(p) for p in c.pairs]
        case PartitionV():
            return list(c.parts)
        case GroundDomain():
            if not c.is_finite():
                raise EvalError("infinite-domain", "cannot iterate over an infinite domain")
            return list(c.enumerate())
    if isinstance(c, SYMBOLIC):
        raise NeedsConcrete("iteration over a decision variable")
    raise _kind(f"cannot iterate over {show(c)}")


def _flat_entries(m: Value) -> list:
    if isinstance(m, MatrixV):
        return [y for x in m.entries for y in _flat_entries(x)]
    return [m]


# ---------------------------------------------------------------- arithmetic

def int_div_mod(x: int, y: int) -> tuple[int, int]:
    if y == 0:
        raise EvalError("division-by-zero", f"{x} / 0 is undefined")
    return x // y, x % y


def op_div(x: int, y: int) -> int:
    return int_div_mod(x, y)[0]


def op_mod(x: int, y: int) -> int:
    return int_div_mod(x, y)[1]


def power(x: int, y: int) -> int:
    if y < 0:
        raise EvalError("negative-exponent", f"{x} ** {y} has a negative exponent")
    if abs(x) > 1 and y * (abs(x).bit_length() - 1) > _MAX_BITS:
        raise EvalError("overflow", f"{x} ** {y} is far outside the integer range")
    return x ** y


def factorial(x: int) -> int:
    if x <= 0:
        return 1
    if x > 600:
        raise EvalError("overflow", f"{x}! is far outside the integer range")
    return math.factorial(x)


def abs_int(x: int) -> int:
    return abs(x)


def op_neg(x: Value) -> Value:
    if _is_int(x):
        return -x
    raise _kind("negation needs an integer")


def op_not(x: Value) -> bool:
    if isinstance(x, bool):
        return not x
    raise _kind("logical negation needs a Boolean")


def op_bars(x: Value) -> int:
    if _is_int(x):
        return abs(x)
    if isinstance(x, (SetV, MSetV, SequenceV, FunctionV, RelationV, PartitionV, MatrixV)):
        return len(x)
    if isinstance(x, GroundDomain):
        return len(elements(x))
    raise _kind(f"|{show(x)}| is not defined")


def _arith(name: str, f: Callable[[int, int], int]) -> Callable:
    def g(a, b):
        if _is_int(a) and _is_int(b):
            return f(a, b)
        raise _kind(f"{name} needs integers")
    return g


def op_minus(a: Value, b: Value) -> Value:
    if _is_int(a) and _is_int(b):
        return a - b
    if isinstance(a, SetV) and isinstance(b, SetV):
        return SetV(x for x in a.items if x not in b)
    if isinstance(a, RelationV) and isinstance(b, RelationV):
        return RelationV(x for x in a.items if x not in b)
    if isinstance(a, MSetV) and isinstance(b, MSetV):
        cb = Counter(vkey(x) for x in b.items)
        out = []
        for x, c in a.counts():
            k = c - cb[vkey(x)]
            out.extend([x] * max(k, 0))
        return MSetV(out)
    raise _kind("- needs integers or two collections of the same kind")


# ---------------------------------------------------------------- comparison

def op_eq(a: Value, b: Value) -> bool:
    if type(a) is int and type(b) is int:
        return a == b
    return vkey(a) == vkey(b)


def op_neq(a: Value, b: Value) -> bool:
    return not op_eq(a, b)


def _ordered(a: Value, b: Value) -> tuple:
    if type(a) is int and type(b) is int:
        return a, b
    ka, kb = vkey(a), vkey(b)
    if ka[0] != kb[0] or ka[0] not in (0, 1, 2):
        raise _kind("ordering needs two integers, two Booleans or two enum members")
    return ka, kb


def op_lt(a, b):
    x, y = _ordered(a, b)
    return x < y


def op_le(a, b):
    x, y = _ordered(a, b)
    return x <= y


def op_gt(a, b):
    x, y = _ordered(a, b)
    return x > y


def op_ge(a, b):
    x, y = _ordered(a, b)
    return x >= y


def _lex(m: Value) -> list:
    if isinstance(m, (MatrixV, SequenceV)):
        return [vkey(x) for x in _flat_entries(m if isinstance(m, MatrixV) else MatrixV.from_list(m.items))]
    raise _kind("lexicographic comparison needs lists")


def compare(op: str, a: Value, b: Value) -> bool:
    match op:
        case "=":
            return op_eq(a, b)
        case "!=":
            return op_neq(a, b)
        case "<":
            return op_lt(a, b)
        case "<=":
            return op_le(a, b)
        case ">":
            return op_gt(a, b)
        case ">=":
            return op_ge(a, b)
        case "<lex":
            return _lex(a) < _lex(b)
        case "<=lex":
            return _lex(a) <= _lex(b)
        case ">lex":
            return _lex(a) > _lex(b)
        case ">=lex":
            return _lex(a) >= _lex(b)
    raise ValueError(op)


def op_iff(a: Value, b: Value) -> bool:
    if isinstance(a, bool) and isinstance(b, bool):
        return a == b
    raise _kind("<-> needs Booleans")


# ---------------------------------------------------------------- sets and msets

def op_in(x: Value, c: Value) -> bool:
    match c:
        case SetV() | RelationV():
            return x in c
        case MSetV():
            return c.count(x) > 0
        case GroundDomain():
            return c.member(x)
    return any(op_eq(x, y) for y in elements(c))


def _counts(c: Value) -> Counter:
    return Counter(vkey(x) for x in c.items)


def op_subset_eq(a: Value, b: Value) -> bool:
    if isinstance(a, MSetV) and isinstance(b, MSetV):
        ca, cb = _counts(a), _counts(b)
        return all(cb[k] >= n for k, n in ca.items())
    if isinstance(a, (SetV, RelationV)) and isinstance(b, (SetV, RelationV)):
        return all(x in b for x in a.items)
    raise _kind("subset needs two sets or two multi-sets")


def op_subset(a, b):
    return op_subset_eq(a, b) and not op_eq(a, b)


def op_supset_eq(a, b):
    return op_subset_eq(b, a)


def op_supset(a, b):
    return op_subset(b, a)


def op_union(a: Value, b: Value) -> Value:
    if isinstance(a, SetV) and isinstance(b, SetV):
        return SetV(a.items + b.items)
    if isinstance(a, RelationV) and isinstance(b, RelationV):
        return RelationV(a.items + b.items)
    if isinstance(a, MSetV) and isinstance(b, MSetV):
        ca, cb = _counts(a), _counts(b)
        rep = {vkey(x): x for x in a.items + b.items}
        return MSetV(x for k, x in rep.items() for _ in range(max(ca[k], cb[k])))
    raise _kind("union needs two collections of the same kind")


def op_intersect(a: Value, b: Value) -> Value:
    if isinstance(a, SetV) and isinstance(b, SetV):
        return SetV(x for x in a.items if x in b)
    if isinstance(a, RelationV) and isinstance(b, RelationV):
        return RelationV(x for x in a.items if x in b)
    if isinstance(a, MSetV) and isinstance(b, MSetV):
        ca, cb = _counts(a), _counts(b)
        rep = {vkey(x): x for x in a.items}
        return MSetV(x for k, x in rep.items() for _ in range(min(ca[k], cb[k])))
    raise _kind("intersect needs two collections of the same kind")


def power_set(s: Value) -> SetV:
    if not isinstance(s, SetV):
        raise _kind("powerSet needs a set")
    items = s.items
    return SetV(SetV(c) for k in range(len(items) + 1) for c in combinations(items, k))


# ---------------------------------------------------------------- sequences

def _seq_items(s: Value) -> list:
    if isinstance(s, SequenceV):
        return list(s.items)
    if isinstance(s, MatrixV):
        return list(s.entries)
    raise _kind("expected a sequence")


def subsequence(s: Value, t: Value) -> bool:
    it = iter([vkey(x) for x in _seq_items(t)])
    return all(any(k == y for y in it) for k in (vkey(x) for x in _seq_items(s)))


def substring(s: Value, t: Value) -> bool:
    a = [vkey(x) for x in _seq_items(s)]
    b = [vkey(x) for x in _seq_items(t)]
    return any(b[i:i + len(a)] == a for i in range(len(b) - len(a) + 1))


# ---------------------------------------------------------------- functions

def apply_function(f: Value, x: Value) -> Value:
    match f:
        case FunctionV():
            v = f.get(x, _MISSING)
            if v is _MISSING:
                raise EvalError("undefined-application", f"function is not defined at {show(x)}")
            return v
        case SequenceV():
            if _is_int(x) and 1 <= x <= len(f.items):
                return f.items[x - 1]
            raise EvalError("undefined-application", f"sequence is not defined at {show(x)}")
    raise _kind(f"{show(f)} cannot be applied")


def _as_function(f: Value) -> FunctionV:
    if isinstance(f, FunctionV):
        return f
    if isinstance(f, SequenceV):
        return FunctionV(enumerate(f.items, 1))
    raise _kind("expected a function")


def fn_defined(f):
    return SetV(k for k, _ in _as_function(f).pairs)


def fn_range(f):
    return SetV(v for _, v in _as_function(f).pairs)


def image_set(f, x):
    f = _as_function(f)
    return SetV([f.get(x)]) if f.defined(x) else SetV()


def pre_image(f, y):
    return SetV(k for k, v in _as_function(f).pairs if op_eq(v, y))


def inverse(f, g):
    f, g = _as_function(f), _as_function(g)
    return (all(g.defined(b) and op_eq(g.get(b), a) for a, b in f.pairs)
            and all(f.defined(b) and op_eq(f.get(b), a) for a, b in g.pairs))


def restrict(f, d):
    f = _as_function(f)
    if not isinstance(d, GroundDomain):
        raise _kind("restrict needs a domain as second argument")
    return FunctionV((k, v) for k, v in f.pairs if d.member(k))


# ---------------------------------------------------------------- conversions

def to_int(b):
    if isinstance(b, bool):
        return int(b)
    raise _kind("toInt needs a Boolean")


def to_set(c):
    return SetV(elements(c))


def to_mset(c):
    return MSetV(elements(c))


def to_relation(f):
    return RelationV(TupleV(p) for p in _as_function(f).pairs)


# ---------------------------------------------------------------- multisets and lists

def freq(c, x):
    return sum(1 for y in elements(c) if op_eq(x, y))


def hist(c):
    cnt = Counter(vkey(x) for x in elements(c))
    rep = {vkey(x): x for x in elements(c)}
    return SetV(TupleV((rep[k], n)) for k, n in cnt.items())


def _extreme(args: tuple, pick: Callable) -> Value:
    if len(args) == 1:
        items = elements(args[0])
    else:
        items = list(args)
    if not items:
        raise EvalError("bad-index", "max/min of an empty collection")
    for x in items:
        if not (isinstance(x, (bool, int, EnumV))):
            raise _kind("max/min need ordered elements")
    return pick(items, key=vkey)


def fn_max(*args):
    return _extreme(args, max)


def fn_min(*args):
    return _extreme(args, min)


def _step(x: Value, d: int) -> Value:
    if isinstance(x, bool):
        if x == (d > 0):
            raise EvalError("bad-index", f"{show(x)} has no {'successor' if d > 0 else 'predecessor'}")
        return not x
    if _is_int(x):
        return x + d
    if isinstance(x, EnumV):
        i = x.index + d
        if not 1 <= i <= len(x.type.members):
            raise EvalError("bad-index", f"{x.name} has no {'successor' if d > 0 else 'predecessor'}")
        return EnumV(x.type, i)
    raise _kind("pred/succ need an enum member, integer or Boolean")


def pred(x):
    return _step(x, -1)


def succ(x):
    return _step(x, 1)


def all_diff(c):
    ks = [vkey(x) for x in elements(c)]
    return len(set(ks)) == len(ks)


def all_diff_except(c, v):
    kv = vkey(v)
    ks = [k for k in (vkey(x) for x in elements(c)) if k != kv]
    return len(set(ks)) == len(ks)


def flatten(*args):
    if len(args) == 1:
        m = args[0]
        if not isinstance(m, MatrixV):
            raise _kind("flatten needs a matrix")
        return MatrixV.from_list(_flat_entries(m))
    n, m = args
    if not _is_int(n) or n < 0:
        raise _kind("flatten depth must be a non-negative integer")
    if not isinstance(m, MatrixV):
        raise _kind("flatten needs a matrix")
    if n == 0:
        return m
    out: list = []
    for row in m.entries:
        if not isinstance(row, MatrixV):
            raise _kind("flatten depth exceeds the matrix dimension")
        out.extend(flatten(n - 1, row).entries)
    return MatrixV.from_list(out)


def _combine(kind: str, c) -> Value:
    items = elements(c)
    match kind:
        case "sum":
            if not all(_is_int(x) for x in items):
                raise _kind("sum needs integers")
            return sum(items)
        case "product":
            if not all(_is_int(x) for x in items):
                raise _kind("product needs integers")
            return math.prod(items)
    if not all(isinstance(x, bool) for x in items):
        raise _kind(f"{kind} needs Booleans")
    match kind:
        case "and":
            return all(items)
        case "or":
            return any(items)
        case "xor":
            return sum(items) % 2 == 1
    raise ValueError(kind)


def combine(kind: str, items) -> Value:
    return _combine(kind, items)


# ---------------------------------------------------------------- partitions

def _partition(p) -> PartitionV:
    if isinstance(p, PartitionV):
        return p
    raise _kind("expected a partition")


def party(x, p):
    part = _partition(p).party(x)
    if part is None:
        raise EvalError("not-a-participant", f"{show(x)} is not in the partition")
    return part


def parts(p):
    return SetV(_partition(p).parts)


def participants(p):
    return _partition(p).participants()


def together(xs, p):
    p = _partition(p)
    found = [p.party(x) for x in elements(xs)]
    if any(q is None for q in found):
        return False
    return len({vkey(q) for q in found}) <= 1


def apart(xs, p):
    p = _partition(p)
    if any(p.party(x) is None for x in elements(xs)):
        return False
    return not together(xs, p)


CALLS: dict[str, Callable] = {
    "toInt": to_int, "toSet": to_set, "toMSet": to_mset, "toRelation": to_relation,
    "defined": fn_defined, "range": fn_range, "image": apply_function,
    "imageSet": image_set, "preImage": pre_image, "inverse": inverse,
    "restrict": restrict, "freq": freq, "hist": hist, "max": fn_max, "min": fn_min,
    "pred": pred, "succ": succ, "allDiff": all_diff,
    "alldifferent_except": all_diff_except, "flatten": flatten, "powerSet": power_set,
    "party": party, "parts": parts, "participants": participants, "apart": apart,
    "together": together, "subsequence": subsequence, "substring": substring,
    "sum": lambda c: _combine("sum", c), "product": lambda c: _combine("product", c),
    "and": lambda c: _combine("and", c), "or": lambda c: _combine("or", c),
    "xor": lambda c: _combine("xor", c), "factorial": lambda x: factorial(x),
}

BINARY: dict[str, Callable] = {
    "+": _arith("+", lambda a, b: a + b),
    "-": op_minus,
    "*": _arith("*", lambda a, b: a * b),
    "/": _arith("/", op_div),
    "%": _arith("%", op_mod),
    "**": _arith("**", power),
    "=": op_eq, "!=": op_neq, "<": op_lt, "<=": op_le, ">": op_gt, ">=": op_ge,
    "<lex": lambda a, b: compare("<lex", a, b), "<=lex": lambda a, b: compare("<=lex", a, b),
    ">lex": lambda a, b: compare(">lex", a, b), ">=lex": lambda a, b: compare(">=lex", a, b),
    "<->": op_iff, "in": op_in, "subset": op_subset, "subsetEq": op_subset_eq,
    "supset": op_supset, "supsetEq": op_supset_eq, "union": op_union,
    "intersect": op_intersect, "subsequence": subsequence, "substring": substring,
}

UNARY: dict[str, Callable] = {
    "-": op_neg, "!": op_not, "||": op_bars,
    "factorial": lambda x: factorial(x) if _is_int(x) else _bad_factorial(),
}


def _bad_factorial():
    raise _kind("factorial needs an integer")


# ---------------------------------------------------------------- logic

def _truth(v: object) -> object:
    if isinstance(v, bool) or isinstance(v, SYMBOLIC):
        return v
    raise _kind("expected a Boolean")


def and_all(thunks) -> object:
    """Conjunction that is false if any part is false, regardless of errors elsewhere."""
    syms: list = []
    err = None
    for t in thunks:
        try:
            v = _truth(t())
        except EvalError as e:
            err = err or e
            continue
        if isinstance(v, SYMBOLIC):
            syms.append(to_sym(v))
        elif not v:
            return False
    if syms:
        return syms[0] if len(syms) == 1 and err is None else AndSym(tuple(syms), err)
    if err is not None:
        raise err
    return True


def or_any(thunks) -> object:
    syms: list = []
    err = None
    for t in thunks:
        try:
            v = _truth(t())
        except EvalError as e:
            err = err or e
            continue
        if isinstance(v, SYMBOLIC):
            syms.append(to_sym(v))
        elif v:
            return True
    if syms:
        return syms[0] if len(syms) == 1 and err is None else OrSym(tuple(syms), err)
    if err is not None:
        raise err
    return False


def _negate(v: object) -> object:
    return _strict(op_not, v)


# ---------------------------------------------------------------- evaluation

def evaluate(e: A.Expr, env: Env) -> Value:
    """Evaluate to a ground value (or a Sym when decision variables are symbolic)."""
    v = _ev(e, env)
    if isinstance(v, View):
        return v.sym()
    return materialize(v)


def evaluate_in(e: A.Expr, bindings: dict) -> Value:
    return evaluate(e, Env(bindings))


def _ev(e: A.Expr, env: Env) -> object:
    try:
        handler = _HANDLERS[type(e)]
    except KeyError:
        raise TypeError(f"cannot evaluate {type(e).__name__}") from None
    return handler(e, env)


def _ev_ref(e: A.Ref, env: Env) -> object:
    v = env.lookup(e.name)
    if isinstance(v, Lazy):
        root = env.root
        cache = root.cache
        if e.name not in cache:
            cache[e.name] = _ev(v.expr, root)
        return cache[e.name]
    if isinstance(v, EnumDef):
        return GEnum(v, tuple(range(1, len(v.members) + 1)))
    if isinstance(v, UnnamedDef):
        return GUnnamed(v)
    if isinstance(v, A.DOMAIN_TYPES):
        return ground_domain(v, env)
    return v


def _ev_matrix(e: A.MatrixLit, env: Env) -> object:
    items = [_ev(x, env) for x in e.items]
    if e.index is not None:
        idx = list(_enum_index(ground_domain(e.index, env)))
        if len(idx) != len(items):
            raise EvalError("bad-index", "matrix literal does not match its index domain")
    else:
        idx = list(range(1, len(items) + 1))
    if _symbolic(*items):
        return lift(lambda *xs: MatrixV(idx, xs), *items)
    return MatrixV(idx, [_chk(x) for x in items])


def _enum_index(d: GroundDomain) -> Iterator[Value]:
    if not d.is_finite():
        raise EvalError("infinite-domain", "matrix index domains must be finite")
    return d.enumerate()


def _collection(make: Callable, e_items, env: Env) -> object:
    items = [_ev(x, env) for x in e_items]
    if _symbolic(*items):
        return lift(lambda *xs: make(xs), *items)
    return make([_chk(x) for x in items])


def _ev_set(e, env):
    return _collection(SetV, e.items, env)


def _ev_mset(e, env):
    return _collection(MSetV, e.items, env)


def _ev_tuple(e, env):
    return _collection(TupleV, e.items, env)


def _ev_sequence(e, env):
    return _collection(SequenceV, e.items, env)


def _make_relation(items) -> RelationV:
    if not all(isinstance(t, TupleV) for t in items):
        raise _kind("relation literals hold tuples")
    try:
        return RelationV(items)
    except ValueError as err:
        raise EvalError("invalid-value", str(err)) from None


def _ev_relation(e, env):
    return _collection(_make_relation, e.items, env)


def _ev_record(e: A.RecordLit, env):
    names = [n for n, _ in e.fields]
    return _collection(lambda xs: RecordV(zip(names, xs)), [x for _, x in e.fields], env)


def _ev_variant(e: A.VariantLit, env):
    return _strict(lambda x: VariantV(e.name, _chk(x)), _ev(e.value, env))


def _make_function(flat) -> FunctionV:
    try:
        return FunctionV(zip(flat[0::2], flat[1::2]))
    except ValueError as err:
        raise EvalError("invalid-value", str(err)) from None


def _ev_function(e: A.FunctionLit, env):
    flat = [x for pair in e.pairs for x in pair]
    return _collection(_make_function, flat, env)


def _ev_partition(e: A.PartitionLit, env):
    sizes = [len(p) for p in e.parts]
    flat = [x for p in e.parts for x in p]

    def make(xs):
        out, i = [], 0
        for n in sizes:
            out.append(SetV(xs[i:i + n]))
            i += n
        try:
            return PartitionV(out)
        except ValueError as err:
            raise EvalError("invalid-value", str(err)) from None
    return _collection(make, flat, env)


def _ev_unary(e: A.UnaryOp, env):
    v = _ev(e.operand, env)
    if e.op == "||" and isinstance(v, SetView):
        cells = [to_sym(c) for c in (v.presence(x) for x in v.elements)]
        return lift(lambda *bs: sum(1 for b in bs if b), *cells) if cells else 0
    return _strict(UNARY[e.op], v)


def _ev_binary(e: A.BinaryOp, env):
    op = e.op
    if op == "/\\":
        return and_all((lambda: _ev(e.left, env), lambda: _ev(e.right, env)))
    if op == "\\/":
        return or_any((lambda: _ev(e.left, env), lambda: _ev(e.right, env)))
    if op == "->":
        return or_any((lambda: _negate(_truth(_ev(e.left, env))), lambda: _ev(e.right, env)))
    a = _ev(e.left, env)
    b = _ev(e.right, env)
    if op == "in" and isinstance(b, SetView) and not _symbolic(a):
        return b.presence(a)
    return _strict(BINARY[op], a, b)


def _call_arg(x: A.Expr, env: Env) -> object:
    return _ev(x, env)


def _ev_call(e: A.Call, env):
    args = [_call_arg(x, env) for x in e.args]
    fn = CALLS[e.name]
    if e.name in ("image",) and isinstance(args[0], FunctionView) and not _symbolic(args[1]):
        return args[0].apply(args[1])
    return _strict(fn, *args)


def _apply_value(f: object, args: list) -> object:
    key = args[0] if len(args) == 1 else _strict(lambda *xs: TupleV(xs), *args)
    if isinstance(f, FunctionView) and not _symbolic(key):
        return f.apply(key)
    return _strict(apply_function, f, key)


def _ev_apply(e: A.Apply, env):
    return _apply_value(_ev(e.func, env), [_ev(x, env) for x in e.args])


def _index1(base: object, i: object) -> object:
    match base:
        case MatrixV():
            return base.lookup(i)
        case TupleV():
            if _is_int(i) and 1 <= i <= len(base.items):
                return base.items[i - 1]
            raise EvalError("bad-index", f"tuple index {show(i)} out of range")
        case SequenceV():
            return apply_function(base, i)
    raise _kind(f"{show(base)} cannot be indexed")


def _ev_index(e: A.Index, env):
    base = _ev(e.base, env)
    for ix in e.indices:
        if isinstance(ix, A.Ref) and isinstance(base, (RecordV, RecordView, VariantV)):
            name = ix.name
            if isinstance(base, RecordView):
                base = base.get(name)
            elif isinstance(base, RecordV):
                base = base.get(name)
            else:
                if base.name != name:
                    raise EvalError("undefined-application", f"variant field {name} is not active")
                base = base.value
            continue
        i = _ev(ix, env)
        if isinstance(base, MatrixView) and not _symbolic(i):
            base = base.get(i)
        elif isinstance(base, TupleView) and not _symbolic(i):
            if not (_is_int(i) and 1 <= i <= len(base.items)):
                raise EvalError("bad-index", f"tuple index {show(i)} out of range")
            base = base.items[i - 1]
        elif isinstance(base, RecordV | RecordView):
            raise _kind("records are indexed by field name")
        else:
            base = _strict(_index1, base, i)
    return base


# ---------------------------------------------------------------- quantifiers

def _bind_pattern(p: A.Pattern, v: object, out: dict) -> None:
    if isinstance(p, A.NamePattern):
        out[p.name] = v
        return
    if isinstance(v, SYMBOLIC):
        raise NeedsConcrete("destructuring a decision variable")
    if not isinstance(v, TupleV) or len(v.items) != len(p.items):
        raise EvalError("arity-mismatch", "tuple pattern does not match the value")
    for q, x in zip(p.items, v.items):
        _bind_pattern(q, x, out)


def _source_items(how: str, source: object, env: Env) -> list[tuple[object, object]]:
    """(guard, element) pairs; guard is None or a presence Sym."""
    if how == ":":
        d = ground_domain(source, env)
        if not d.is_finite():
            raise EvalError("infinite-domain", "quantification over an infinite domain")
        return [(None, x) for x in d.enumerate()]
    c = _ev(source, env)
    if isinstance(c, SetView):
        return [(c.presence(x), x) for x in c.elements]
    return [(None, x) for x in elements(c)]


def _expand(binders: list[tuple[tuple, str, object]], env: Env) -> Iterator[tuple[list, Env]]:
    """Cross product of binders, later binders seeing earlier names."""
    def go(i: int, guards: list, cur: Env):
        if i == len(binders):
            yield guards, cur
            return
        patterns, how, source = binders[i]
        pairs = _source_items(how, source, cur)
        for combo in _product(pairs, len(patterns)):
            vals: dict = {}
            g = list(guards)
            for p, (guard, x) in zip(patterns, combo):
                _bind_pattern(p, x, vals)
                if guard is not None:
                    g.append(guard)
            yield from go(i + 1, g, cur.child(vals))
    yield from go(0, [], env)


def _product(pairs: list, k: int):
    if k == 1:
        for p in pairs:
            yield (p,)
        return
    for p in pairs:
        for rest in _product(pairs, k - 1):
            yield (p,) + rest


def _guard(guards: list) -> object:
    """Conjunction of presence guards; False if some guard is statically absent."""
    out = []
    for g in guards:
        if g is False:
            return False
        if g is True:
            continue
        out.append(g)
    if not out:
        return True
    return out[0] if len(out) == 1 else AndSym(tuple(out))


def _ev_quantified(e: A.Quantified, env):
    binders = [(b.patterns, b.how, b.source) for b in e.binders]
    body = e.body
    kind = e.kind
    if kind == "forAll":
        def terms():
            for guards, sub in _expand(binders, env):
                g = _guard(guards)
                if g is False:
                    continue
                if g is True:
                    yield lambda sub=sub: _ev(body, sub)
                else:
                    yield lambda sub=sub, g=g: or_any((lambda: _negate(g), lambda: _ev(body, sub)))
        return and_all(terms())
    if kind == "exists":
        def terms():
            for guards, sub in _expand(binders, env):
                g = _guard(guards)
                if g is False:
                    continue
                if g is True:
                    yield lambda sub=sub: _ev(body, sub)
                else:
                    yield lambda sub=sub, g=g: and_all((lambda: g, lambda: _ev(body, sub)))
        return or_any(terms())
    unit = 0 if kind == "sum" else 1
    vals = []
    for guards, sub in _expand(binders, env):
        g = _guard(guards)
        if g is False:
            continue
        v = _ev(body, sub)
        vals.append(v if g is True else IfSym(g, to_sym(v), unit))
    fold = sum if kind == "sum" else math.prod

    def total(*xs):
        if not all(_is_int(x) for x in xs):
            raise _kind(f"{kind} needs integers")
        return fold(xs)
    return _strict(total, *vals)


def _ev_comprehension(e: A.Comprehension, env):
    out: list = []

    def go(i: int, cur: Env):
        if i == len(e.clauses):
            out.append(_ev(e.head, cur))
            return
        c = e.clauses[i]
        if isinstance(c, A.Condition):
            v = _ev(c.expr, cur)
            if isinstance(v, SYMBOLIC):
                raise NeedsConcrete("comprehension condition over decision variables")
            if not isinstance(v, bool):
                raise _kind("comprehension conditions must be Boolean")
            if v:
                go(i + 1, cur)
            return
        how = ":" if c.how == ":" else "in"
        for guard, x in _source_items(how, c.source, cur):
            if guard is not None:
                raise NeedsConcrete("comprehension over a decision variable")
            vals: dict = {}
            _bind_pattern(c.pattern, x, vals)
            go(i + 1, cur.child(vals))

    go(0, env)
    if _symbolic(*out):
        return lift(lambda *xs: MatrixV.from_list(xs), *out)
    return MatrixV.from_list([_chk(x) for x in out])


def _ev_domain_expr(e: A.DomainExpr, env):
    return ground_domain(e.domain, env)


_HANDLERS: dict[type, Callable] = {
    A.IntLit: lambda e, env: e.value,
    A.BoolLit: lambda e, env: e.value,
    A.Const: lambda e, env: e.value,
    A.Ref: _ev_ref,
    A.MatrixLit: _ev_matrix,
    A.SetLit: _ev_set,
    A.MSetLit: _ev_mset,
    A.TupleLit: _ev_tuple,
    A.RecordLit: _ev_record,
    A.VariantLit: _ev_variant,
    A.FunctionLit: _ev_function,
    A.SequenceLit: _ev_sequence,
    A.RelationLit: _ev_relation,
    A.PartitionLit: _ev_partition,
    A.UnaryOp: _ev_unary,
    A.BinaryOp: _ev_binary,
    A.Call: _ev_call,
    A.Apply: _ev_apply,
    A.Index: _ev_index,
    A.Quantified: _ev_quantified,
    A.Comprehension: _ev_comprehension,
    A.DomainExpr: _ev_domain_expr,
}


# ---------------------------------------------------------------- domains

def _concrete(v: object, what: str) -> Value:
    if isinstance(v, SYMBOLIC):
        raise NeedsConcrete(f"{what} depends on decision variables")
    return v


def _int_bound(e: A.Expr, env: Env) -> int:
    v = materialize(_concrete(_ev(e, env), "a domain bound"))
    if not _is_int(v):
        raise _kind("integer domain bounds must be integers")
    return v


def _int_ranges(ranges: tuple, env: Env) -> list[tuple]:
    out = []
    for r in ranges:
        match r:
            case A.Single(x):
                v = materialize(_concrete(_ev(x, env), "a domain bound"))
                if _is_int(v):
                    out.append((v, v))
                else:
                    out.extend((y, y) for y in _int_elements(v))
            case A.From(lo):
                out.append((_int_bound(lo, env), None))
            case A.To(hi):
                out.append((None, _int_bound(hi, env)))
            case A.Bounded(lo, hi):
                out.append((_int_bound(lo, env), _int_bound(hi, env)))
            case A.Open():
                out.append((None, None))
    return out


def _int_elements(v: Value) -> list[int]:
    xs = elements(v)
    if not all(_is_int(x) for x in xs):
        raise _kind("int(...) over a collection needs integer elements")
    return xs


def _enum_def(name: str, env: Env) -> EnumDef:
    d = env.lookup(name)
    if isinstance(d, EnumDef):
        return d
    raise _kind(f"{name} is not an enumerated type")


def _enum_ranges(t: EnumDef, ranges: tuple, env: Env) -> tuple[int, ...]:
    n = len(t.members)

    def idx(x: A.Expr) -> int:
        v = _concrete(_ev(x, env), "an enum bound")
        if isinstance(v, EnumV) and v.type.name == t.name:
            return v.index
        raise _kind(f"enum range bound is not a member of {t.name}")
    keep: set[int] = set()
    for r in ranges:
        match r:
            case A.Single(x):
                keep.add(idx(x))
            case A.From(lo):
                keep.update(range(idx(lo), n + 1))
            case A.To(hi):
                keep.update(range(1, idx(hi) + 1))
            case A.Bounded(lo, hi):
                keep.update(range(idx(lo), idx(hi) + 1))
            case A.Open():
                keep.update(range(1, n + 1))
    return tuple(sorted(keep))


def _attrs(attrs: A.Attrs, env: Env) -> tuple:
    out = []
    for name, x in attrs:
        if x is None:
            out.append((name, None))
            continue
        v = materialize(_concrete(_ev(x, env), "an attribute value"))
        if not _is_int(v) or v < 0:
            raise EvalError("invalid-value", f"attribute {name} needs a non-negative integer")
        out.append((name, v))
    return tuple(sorted(out))


def ground_domain(d: A.Domain, env: Env, seen: frozenset = frozenset()) -> GroundDomain:
    """Evaluate every bound and attribute inside a domain."""
    match d:
        case GroundDomain():
            return d
        case A.BoolDomain():
            return GBool()
        case A.IntDomain(ranges):
            if not ranges:
                return GInt(((None, None),))
            return GInt.make(_int_ranges(ranges, env))
        case A.IntFromSet(expr):
            v = materialize(_concrete(_ev(expr, env), "int(...)"))
            xs = [v] if _is_int(v) else _int_elements(v)
            return GInt.make([(x, x) for x in xs])
        case A.EnumDomain(name, ranges):
            target = env.lookup(name)
            if not isinstance(target, EnumDef):
                if ranges:
                    raise _kind(f"{name} is not an enumerated type")
                return ground_domain(A.DomainAlias(name), env, seen)
            if not ranges:
                return GEnum(target, tuple(range(1, len(target.members) + 1)))
            return GEnum(target, _enum_ranges(target, ranges, env))
        case A.UnnamedDomain(name):
            t = env.lookup(name)
            if not isinstance(t, UnnamedDef):
                raise _kind(f"{name} is not an unnamed type")
            return GUnnamed(t)
        case A.DomainAlias(name):
            if name in seen:
                raise EvalError("invalid-value", f"domain alias cycle through {name}")
            t = env.lookup(name)
            match t:
                case GroundDomain():
                    return t
                case EnumDef():
                    return GEnum(t, tuple(range(1, len(t.members) + 1)))
                case UnnamedDef():
                    return GUnnamed(t)
            if isinstance(t, A.DOMAIN_TYPES):
                return ground_domain(t, env, seen | {name})
            raise _kind(f"{name} is not a domain")
        case A.TupleDomain(components):
            return GTuple(tuple(ground_domain(c, env, seen) for c in components))
        case A.RecordDomain(fields):
            return GRecord(tuple(sorted((n, ground_domain(c, env, seen)) for n, c in fields)))
        case A.VariantDomain(fields):
            return GVariant(tuple(sorted((n, ground_domain(c, env, seen)) for n, c in fields)))
        case A.MatrixDomain(indices, element):
            out = ground_domain(element, env, seen)
            for ix in reversed(indices):
                out = GMatrix(ground_domain(ix, env, seen), out)
            return out
        case A.SetDomain(attrs, element):
            return GSet(_attrs(attrs, env), ground_domain(element, env, seen))
        case A.MSetDomain(attrs, element):
            return GMSet(_attrs(attrs, env), ground_domain(element, env, seen))
        case A.FunctionDomain(attrs, source, target):
            return GFunction(_attrs(attrs, env), ground_domain(source, env, seen),
                             ground_domain(target, env, seen))
        case A.SequenceDomain(attrs, element):
            return GSequence(_attrs(attrs, env), ground_domain(element, env, seen))
        case A.RelationDomain(attrs, components):
            return GRelation(_attrs(attrs, env),
                             tuple(ground_domain(c, env, seen) for c in components))
        case A.PartitionDomain(attrs, element):
            return GPartition(_attrs(attrs, env), ground_domain(element, env, seen))
    raise TypeError(f"not a domain: {d!r}")
