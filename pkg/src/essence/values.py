"""Ground values and the canonical total order over them.

Booleans and integers are plain Python ``bool`` and ``int``. Everything else
is an immutable object whose equality and hash come from :func:`vkey`, so two
values are equal exactly when their canonical keys are.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable

from .errors import EvalError

INT_MAX = 2**62 - 1

Value = Any  # bool | int | one of the classes below


def check_int(x: int) -> int:
    if -INT_MAX <= x <= INT_MAX:
        return x
    raise EvalError("overflow", f"integer {x} outside -(2**62-1)..2**62-1")


@dataclass(frozen=True)
class EnumDef:
    name: str
    members: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.members)

    def value(self, index: int) -> EnumV:
        return EnumV(self, index)

    def lookup(self, member: str) -> EnumV:
        return EnumV(self, self.members.index(member) + 1)

    def values(self) -> list[EnumV]:
        return [EnumV(self, i) for i in range(1, len(self.members) + 1)]


@dataclass(frozen=True)
class UnnamedDef:
    name: str
    size: int

    def values(self) -> list[UnnamedV]:
        return [UnnamedV(self, i) for i in range(1, self.size + 1)]


class _Keyed:
    """Mixin giving equality, hashing and ordering through a cached key."""

    __slots__ = ("_key", "_hash")

    def key(self) -> tuple:
        try:
            return self._key
        except AttributeError:
            k = self._make_key()
            object.__setattr__(self, "_key", k)
            return k

    def _make_key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, _Keyed):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            h = hash(self.key())
            object.__setattr__(self, "_hash", h)
            return h

    def __lt__(self, other: object) -> bool:
        return vkey(self) < vkey(other)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __repr__(self) -> str:
        return show(self)


def _init(obj: object, **fields: object) -> None:
    for name, value in fields.items():
        object.__setattr__(obj, name, value)


class EnumV(_Keyed):
    __slots__ = ("type", "index")

    def __init__(self, type: EnumDef, index: int) -> None:
        if not 1 <= index <= len(type.members):
            raise EvalError("bad-index", f"no member {index} in enum {type.name}")
        _init(self, type=type, index=index)

    @property
    def name(self) -> str:
        return self.type.members[self.index - 1]

    def _make_key(self) -> tuple:
        return (2, self.type.name, self.index)


class UnnamedV(_Keyed):
    __slots__ = ("type", "index")

    def __init__(self, type: UnnamedDef, index: int) -> None:
        if not 1 <= index <= type.size:
            raise EvalError("bad-index", f"no member {index} in type {type.name}")
        _init(self, type=type, index=index)

    @property
    def name(self) -> str:
        return f"{self.type.name}_{self.index}"

    def _make_key(self) -> tuple:
        return (3, self.type.name, self.index)


class TupleV(_Keyed):
    __slots__ = ("items",)

    def __init__(self, items: Iterable[Value]) -> None:
        _init(self, items=tuple(items))

    def __len__(self) -> int:
        return len(self.items)

    def _make_key(self) -> tuple:
        return (4, tuple(vkey(x) for x in self.items))


class RecordV(_Keyed):
    __slots__ = ("fields",)

    def __init__(self, fields: Iterable[tuple[str, Value]]) -> None:
        fs = tuple(sorted(fields, key=lambda kv: kv[0]))
        names = [n for n, _ in fs]
        if len(set(names)) != len(names):
            raise ValueError("duplicate record field")
        _init(self, fields=fs)

    def get(self, name: str) -> Value:
        for n, v in self.fields:
            if n == name:
                return v
        raise EvalError("bad-index", f"record has no field {name}")

    def _make_key(self) -> tuple:
        return (5, tuple((n, vkey(v)) for n, v in self.fields))


class VariantV(_Keyed):
    __slots__ = ("name", "value")

    def __init__(self, name: str, value: Value) -> None:
        _init(self, name=name, value=value)

    def _make_key(self) -> tuple:
        return (6, self.name, vkey(self.value))


class MatrixV(_Keyed):
    """One-dimensional matrix; higher dimensions nest.

    ``index`` holds the index values in order. ``index_domain`` optionally
    records the domain text to print and takes no part in equality.
    """

    __slots__ = ("index", "entries", "index_domain", "_pos")

    def __init__(self, index: Iterable[Value], entries: Iterable[Value],
                 index_domain: object = None) -> None:
        idx = tuple(index)
        ents = tuple(entries)
        if len(idx) != len(ents):
            raise ValueError("matrix index and entries differ in length")
        _init(self, index=idx, entries=ents, index_domain=index_domain)

    @classmethod
    def from_list(cls, entries: Iterable[Value]) -> MatrixV:
        ents = tuple(entries)
        return cls(range(1, len(ents) + 1), ents)

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, i: Value) -> Value:
        try:
            pos = self._pos
        except AttributeError:
            pos = {vkey(x): n for n, x in enumerate(self.index)}
            object.__setattr__(self, "_pos", pos)
        n = pos.get(vkey(i))
        if n is None:
            raise EvalError("bad-index", f"index {show(i)} out of range")
        return self.entries[n]

    def _make_key(self) -> tuple:
        return (7, tuple(vkey(x) for x in self.entries),
                tuple(vkey(x) for x in self.index))


def _dedup_sorted(items: Iterable[Value]) -> tuple:
    seen: dict = {}
    for x in items:
        seen.setdefault(vkey(x), x)
    return tuple(seen[k] for k in sorted(seen))


class SetV(_Keyed):
    __slots__ = ("items", "_set")

    def __init__(self, items: Iterable[Value] = ()) -> None:
        _init(self, items=_dedup_sorted(items))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __contains__(self, x: Value) -> bool:
        try:
            s = self._set
        except AttributeError:
            s = frozenset(vkey(y) for y in self.items)
            object.__setattr__(self, "_set", s)
        return vkey(x) in s

    def _make_key(self) -> tuple:
        return (8, tuple(vkey(x) for x in self.items))


class MSetV(_Keyed):
    __slots__ = ("items",)

    def __init__(self, items: Iterable[Value] = ()) -> None:
        _init(self, items=tuple(sorted(items, key=vkey)))

    @classmethod
    def from_counts(cls, counts: Iterable[tuple[Value, int]]) -> MSetV:
        out = []
        for v, c in counts:
            if c < 1:
                raise ValueError("multiplicities must be positive")
            out.extend([v] * c)
        return cls(out)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def counts(self) -> list[tuple[Value, int]]:
        c = Counter(vkey(x) for x in self.items)
        first = {}
        for x in self.items:
            first.setdefault(vkey(x), x)
        return [(first[k], c[k]) for k in sorted(c)]

    def count(self, x: Value) -> int:
        k = vkey(x)
        return sum(1 for y in self.items if vkey(y) == k)

    def _make_key(self) -> tuple:
        return (9, tuple(vkey(x) for x in self.items))


class FunctionV(_Keyed):
    __slots__ = ("pairs", "_map")

    def __init__(self, pairs: Iterable[tuple[Value, Value]] = ()) -> None:
        m: dict = {}
        for k, v in pairs:
            kk = vkey(k)
            if kk in m and vkey(m[kk][1]) != vkey(v):
                raise ValueError(f"function maps {show(k)} to two values")
            m[kk] = (k, v)
        _init(self, pairs=tuple(m[k] for k in sorted(m)),
              _map={k: v for k, (_, v) in m.items()})

    def __len__(self) -> int:
        return len(self.pairs)

    def get(self, k: Value, default: Value = None) -> Value:
        return self._map.get(vkey(k), default)

    def defined(self, k: Value) -> bool:
        return vkey(k) in self._map

    def _make_key(self) -> tuple:
        return (10, tuple((vkey(k), vkey(v)) for k, v in self.pairs))


class SequenceV(_Keyed):
    __slots__ = ("items",)

    def __init__(self, items: Iterable[Value] = ()) -> None:
        _init(self, items=tuple(items))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def _make_key(self) -> tuple:
        return (11, tuple(vkey(x) for x in self.items))


class RelationV(_Keyed):
    __slots__ = ("items", "_set")

    def __init__(self, items: Iterable[TupleV] = ()) -> None:
        ts = _dedup_sorted(items)
        if len({len(t) for t in ts}) > 1:
            raise ValueError("relation tuples differ in arity")
        _init(self, items=ts)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __contains__(self, t: Value) -> bool:
        try:
            s = self._set
        except AttributeError:
            s = frozenset(vkey(y) for y in self.items)
            object.__setattr__(self, "_set", s)
        return vkey(t) in s

    def _make_key(self) -> tuple:
        return (12, tuple(vkey(x) for x in self.items))


class PartitionV(_Keyed):
    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[Iterable[Value]] = ()) -> None:
        ps = [p if isinstance(p, SetV) else SetV(p) for p in parts]
        seen: set = set()
        for p in ps:
            if not p.items:
                raise ValueError("partition parts must be non-empty")
            for x in p.items:
                k = vkey(x)
                if k in seen:
                    raise ValueError("partition parts must be disjoint")
                seen.add(k)
        _init(self, parts=tuple(sorted(ps, key=vkey)))

    def __len__(self) -> int:
        return len(self.parts)

    def participants(self) -> SetV:
        return SetV(x for p in self.parts for x in p.items)

    def party(self, x: Value) -> SetV | None:
        for p in self.parts:
            if x in p:
                return p
        return None

    def _make_key(self) -> tuple:
        return (13, tuple(vkey(p)[1] for p in self.parts))


def vkey(v: Value) -> tuple:
    """Canonical sort key. Within a kind, collections compare as sorted lists."""
    if v is True or v is False:
        return (0, int(v))
    if isinstance(v, int):
        return (1, v)
    return v.key()


def sort_values(values: Iterable[Value]) -> list[Value]:
    return sorted(values, key=vkey)


def structural_equal(a: Value, b: Value) -> bool:
    return vkey(a) == vkey(b)


def kind_of(v: Value) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    return {
        EnumV: "enum", UnnamedV: "unnamed", TupleV: "tuple", RecordV: "record",
        VariantV: "variant", MatrixV: "matrix", SetV: "set", MSetV: "mset",
        FunctionV: "function", SequenceV: "sequence", RelationV: "relation",
        PartitionV: "partition",
    }[type(v)]


def validate(v: Value) -> None:
    """Walk a value and re-check every construction invariant."""
    match v:
        case bool():
            pass
        case int():
            check_int(v)
        case EnumV() | UnnamedV():
            pass
        case TupleV() | SequenceV():
            for x in v.items:
                validate(x)
        case RecordV():
            for _, x in v.fields:
                validate(x)
        case VariantV():
            validate(v.value)
        case MatrixV():
            for x in v.entries:
                validate(x)
        case SetV() | RelationV():
            if len({vkey(x) for x in v.items}) != len(v.items):
                raise ValueError("duplicate elements")
            for x in v.items:
                validate(x)
        case MSetV():
            for x in v.items:
                validate(x)
        case FunctionV():
            if len({vkey(k) for k, _ in v.pairs}) != len(v.pairs):
                raise ValueError("duplicate function keys")
            for k, x in v.pairs:
                validate(k)
                validate(x)
        case PartitionV():
            PartitionV(v.parts)
        case _:
            raise TypeError(f"not a value: {v!r}")


def show(v: Value) -> str:
    """Flat Essence text for a value, used in messages and reprs."""
    match v:
        case True:
            return "true"
        case False:
            return "false"
        case int():
            return str(v)
        case EnumV() | UnnamedV():
            return v.name
        case TupleV():
            return f"({', '.join(show(x) for x in v.items)})" if len(v.items) >= 2 \
                else f"tuple({', '.join(show(x) for x in v.items)})"
        case RecordV():
            return "record {" + ", ".join(f"{n} = {show(x)}" for n, x in v.fields) + "}"
        case VariantV():
            return f"variant {{{v.name} = {show(v.value)}}}"
        case MatrixV():
            return "[" + ", ".join(show(x) for x in v.entries) + "]"
        case SetV():
            return "{" + ", ".join(show(x) for x in v.items) + "}"
        case MSetV():
            return f"mset({', '.join(show(x) for x in v.items)})"
        case FunctionV():
            return f"function({', '.join(f'{show(a)} --> {show(b)}' for a, b in v.pairs)})"
        case SequenceV():
            return f"sequence({', '.join(show(x) for x in v.items)})"
        case RelationV():
            return f"relation({', '.join(show(x) for x in v.items)})"
        case PartitionV():
            return f"partition({', '.join(show(p) for p in v.parts)})"
    return repr(v)
