"""Partially known values used by the solver to evaluate constraints early.

During search every decision variable is split into *cells*, each holding one
option from a finite list. A :class:`Sym` is an expression over cells that
compiles to a closure taking the current assignment (a list indexed by cell
id, ``UNSET`` where unassigned). The closure either returns a value, raises
:class:`EvalError`, or raises :class:`Unknown` when the answer still depends
on unassigned cells. A definite error always wins over ``Unknown`` so the
solver may prune on it.

Views mirror the structure of a decision variable (matrix, tuple, record,
set, function) so that indexing, application and membership reach single
cells instead of the whole variable.
"""

from __future__ import annotations

from typing import Callable

from .errors import EvalError
from .values import (FunctionV, MatrixV, RecordV, RelationV, SetV, TupleV,
                     Value)


class Unknown(Exception):
    """The result depends on a cell that has no value yet."""


UNKNOWN = Unknown()


class NeedsConcrete(Exception):
    """The symbolic evaluator cannot handle this expression shape."""


class _Opt:
    __slots__ = ("name",)

    def __init__(self, name: str) -> None:
        self.name = name

    def __repr__(self) -> str:
        return self.name


UNSET = _Opt("UNSET")
# Presence options of set/relation elements and function keys. STOP means
# "absent, and so is everything after"; OUT means "absent, something later is
# present". In option order this reproduces list-lexicographic enumeration.
STOP = _Opt("STOP")
IN = _Opt("IN")
OUT = _Opt("OUT")


class Sym:
    __slots__ = ("deps", "_fn")

    def fn(self) -> Callable[[list], Value]:
        try:
            return self._fn
        except AttributeError:
            self._fn = self.compile()
            return self._fn

    def compile(self) -> Callable[[list], Value]:
        raise NotImplementedError


def _const(c: Value) -> Callable[[list], Value]:
    return lambda A: c


def _compiled(x: object) -> Callable[[list], Value]:
    return x.fn() if isinstance(x, Sym) else _const(x)


class CellSym(Sym):
    __slots__ = ("cid", "decode")

    def __init__(self, cid: int, decode: Callable[[object], Value] | None = None) -> None:
        self.cid = cid
        self.decode = decode
        self.deps = frozenset((cid,))

    def compile(self):
        cid, dec = self.cid, self.decode
        if dec is None:
            def f(A):
                v = A[cid]
                if v is UNSET:
                    raise UNKNOWN
                return v
        else:
            def f(A):
                v = A[cid]
                if v is UNSET:
                    raise UNKNOWN
                return dec(v)
        return f


class LiftSym(Sym):
    """A strict function applied to possibly symbolic arguments."""
    __slots__ = ("func", "args")

    def __init__(self, func: Callable, args: tuple) -> None:
        self.func = func
        self.args = args
        deps: set = set()
        for a in args:
            if isinstance(a, Sym):
                deps |= a.deps
        self.deps = frozenset(deps)

    def compile(self):
        fn = self.func
        gs = [_compiled(a) for a in self.args]
        if len(gs) == 1:
            g0 = gs[0]
            return lambda A: fn(g0(A))
        if len(gs) == 2:
            g0, g1 = gs

            def f2(A):
                try:
                    a = g0(A)
                except Unknown:
                    g1(A)  # a definite error on the right still counts
                    raise
                return fn(a, g1(A))
            return f2

        def f(A):
            vals = []
            unknown = False
            for g in gs:
                try:
                    vals.append(g(A))
                except Unknown:
                    unknown = True
            if unknown:
                raise UNKNOWN
            return fn(*vals)
        return f


class AndSym(Sym):
    """Conjunction: any false gives false, else any error gives that error."""
    __slots__ = ("args", "error")

    def __init__(self, args: tuple, error: EvalError | None = None) -> None:
        self.args = args
        self.error = error
        self.deps = frozenset().union(*(a.deps for a in args))

    def compile(self):
        gs = [a.fn() for a in self.args]
        err0 = self.error

        def f(A):
            unknown = False
            err = err0
            for g in gs:
                try:
                    if not g(A):
                        return False
                except Unknown:
                    unknown = True
                except EvalError as e:
                    err = err or e
            if unknown:
                raise UNKNOWN
            if err is not None:
                raise err
            return True
        return f


class OrSym(Sym):
    __slots__ = ("args", "error")

    def __init__(self, args: tuple, error: EvalError | None = None) -> None:
        self.args = args
        self.error = error
        self.deps = frozenset().union(*(a.deps for a in args))

    def compile(self):
        gs = [a.fn() for a in self.args]
        err0 = self.error

        def f(A):
            unknown = False
            err = err0
            for g in gs:
                try:
                    if g(A):
                        return True
                except Unknown:
                    unknown = True
                except EvalError as e:
                    err = err or e
            if unknown:
                raise UNKNOWN
            if err is not None:
                raise err
            return False
        return f


class IfSym(Sym):
    __slots__ = ("cond", "then", "other")

    def __init__(self, cond: Sym, then: object, other: object) -> None:
        self.cond, self.then, self.other = cond, then, other
        deps = set(cond.deps)
        for x in (then, other):
            if isinstance(x, Sym):
                deps |= x.deps
        self.deps = frozenset(deps)

    def compile(self):
        c, t, o = self.cond.fn(), _compiled(self.then), _compiled(self.other)
        return lambda A: t(A) if c(A) else o(A)


# ---------------------------------------------------------------- views

class View:
    __slots__ = ("_sym",)

    def sym(self) -> Sym:
        try:
            return self._sym
        except AttributeError:
            self._sym = self.build()
            return self._sym

    def build(self) -> Sym:
        raise NotImplementedError

    def cells(self) -> list[int]:
        raise NotImplementedError


def to_sym(x: object) -> object:
    """Views become their whole-value Sym; everything else passes through."""
    return x.sym() if isinstance(x, View) else x


SYMBOLIC = (Sym, View)


def lift(func: Callable, *args) -> Sym:
    return LiftSym(func, tuple(to_sym(a) for a in args))


def _sub_cells(x: object) -> list[int]:
    if isinstance(x, View):
        return x.cells()
    return sorted(x.deps)


class MatrixView(View):
    __slots__ = ("index", "entries", "_pos")

    def __init__(self, index: tuple, entries: tuple) -> None:
        from .values import vkey
        self.index = index
        self.entries = entries
        self._pos = {vkey(i): n for n, i in enumerate(index)}

    def get(self, i: Value) -> object:
        from .values import show, vkey
        n = self._pos.get(vkey(i))
        if n is None:
            raise EvalError("bad-index", f"index {show(i)} out of range")
        return self.entries[n]

    def build(self):
        index = self.index
        return LiftSym(lambda *xs: MatrixV(index, xs), tuple(to_sym(e) for e in self.entries))

    def cells(self):
        return [c for e in self.entries for c in _sub_cells(e)]


class TupleView(View):
    __slots__ = ("items",)

    def __init__(self, items: tuple) -> None:
        self.items = items

    def build(self):
        return LiftSym(lambda *xs: TupleV(xs), tuple(to_sym(e) for e in self.items))

    def cells(self):
        return [c for e in self.items for c in _sub_cells(e)]


class RecordView(View):
    __slots__ = ("names", "items")

    def __init__(self, names: tuple, items: tuple) -> None:
        self.names = names
        self.items = items

    def get(self, name: str) -> object:
        try:
            return self.items[self.names.index(name)]
        except ValueError:
            raise EvalError("bad-index", f"record has no field {name}") from None

    def build(self):
        names = self.names
        return LiftSym(lambda *xs: RecordV(zip(names, xs)), tuple(to_sym(e) for e in self.items))

    def cells(self):
        return [c for e in self.items for c in _sub_cells(e)]


def _is_in(o: object) -> bool:
    return o is IN


class SetView(View):
    """A set (or relation) as one presence cell per candidate element."""
    __slots__ = ("elements", "cids", "relation", "_pos")

    def __init__(self, elements: list, cids: list[int], relation: bool = False) -> None:
        from .values import vkey
        self.elements = elements
        self.cids = cids
        self.relation = relation
        self._pos = {vkey(e): c for e, c in zip(elements, cids)}

    def presence(self, x: Value) -> object:
        from .values import vkey
        c = self._pos.get(vkey(x))
        return False if c is None else CellSym(c, _is_in)

    def build(self):
        elems = self.elements
        make = RelationV if self.relation else SetV
        return LiftSym(lambda *os: make([e for e, o in zip(elems, os) if o is IN]),
                       tuple(CellSym(c) for c in self.cids))

    def cells(self):
        return list(self.cids)


def _undefined(o: object) -> Value:
    if o is STOP or o is OUT:
        raise EvalError("undefined-application", "function is not defined here")
    return o


class FunctionView(View):
    """A function as one cell per key of its source domain."""
    __slots__ = ("keys", "cids", "total", "_pos")

    def __init__(self, keys: list, cids: list[int], total: bool) -> None:
        from .values import vkey
        self.keys = keys
        self.cids = cids
        self.total = total
        self._pos = {vkey(k): c for k, c in zip(keys, cids)}

    def apply(self, k: Value) -> object:
        from .values import show, vkey
        c = self._pos.get(vkey(k))
        if c is None:
            raise EvalError("undefined-application", f"function is not defined at {show(k)}")
        return CellSym(c) if self.total else CellSym(c, _undefined)

    def build(self):
        keys = self.keys
        return LiftSym(lambda *os: FunctionV((k, o) for k, o in zip(keys, os)
                                             if o is not STOP and o is not OUT),
                       tuple(CellSym(c) for c in self.cids))

    def cells(self):
        return list(self.cids)
