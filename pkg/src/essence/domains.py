"""Ground domains: finiteness, enumeration in canonical order, membership.

A ground domain has every bound and attribute evaluated. Enumeration yields
values in strictly increasing :func:`~essence.values.vkey` order, which is the
order the solver searches in.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator

from .errors import EvalError
from .values import (EnumDef, EnumV, FunctionV, MatrixV, MSetV, PartitionV,
                     RecordV, RelationV, SequenceV, SetV, TupleV, UnnamedDef,
                     UnnamedV, Value, VariantV, vkey)

GAttrs = tuple  # sorted tuple of (name, int | None)


def _amap(attrs: GAttrs) -> dict[str, int | None]:
    return dict(attrs)


class GroundDomain:
    def is_finite(self) -> bool:
        raise NotImplementedError

    def enumerate(self) -> Iterator[Value]:
        raise NotImplementedError

    def member(self, v: Value) -> bool:
        raise NotImplementedError

    def count(self) -> int | None:
        """Number of values (an upper bound for attribute-filtered kinds)."""
        raise NotImplementedError


@dataclass(frozen=True)
class GBool(GroundDomain):
    def is_finite(self) -> bool:
        return True

    def enumerate(self):
        yield False
        yield True

    def member(self, v):
        return isinstance(v, bool)

    def count(self):
        return 2


@dataclass(frozen=True)
class GInt(GroundDomain):
    """Union of closed intervals; ``None`` marks an open end."""
    ranges: tuple[tuple[int | None, int | None], ...]

    @staticmethod
    def make(ranges) -> GInt:
        rs = [(lo, hi) for lo, hi in ranges if lo is None or hi is None or lo <= hi]
        rs.sort(key=lambda r: (-math.inf if r[0] is None else r[0]))
        merged: list[list] = []
        for lo, hi in rs:
            if merged:
                plo, phi = merged[-1]
                if phi is None or lo is None or lo <= phi + 1:
                    merged[-1][1] = None if (phi is None or hi is None) else max(phi, hi)
                    continue
            merged.append([lo, hi])
        return GInt(tuple((lo, hi) for lo, hi in merged))

    def is_finite(self):
        return all(lo is not None and hi is not None for lo, hi in self.ranges)

    def enumerate(self):
        if not self.is_finite():
            raise EvalError("infinite-domain", "cannot enumerate an unbounded integer domain")
        for lo, hi in self.ranges:
            yield from range(lo, hi + 1)

    def member(self, v):
        if isinstance(v, bool) or not isinstance(v, int):
            return False
        return any((lo is None or lo <= v) and (hi is None or v <= hi) for lo, hi in self.ranges)

    def count(self):
        if not self.is_finite():
            return None
        return sum(hi - lo + 1 for lo, hi in self.ranges)

    def bounds(self) -> tuple[int | None, int | None]:
        if not self.ranges:
            return (0, -1)
        return (self.ranges[0][0], self.ranges[-1][1])


@dataclass(frozen=True)
class GEnum(GroundDomain):
    type: EnumDef
    indices: tuple[int, ...]

    def is_finite(self):
        return True

    def enumerate(self):
        for i in self.indices:
            yield EnumV(self.type, i)

    def member(self, v):
        return isinstance(v, EnumV) and v.type.name == self.type.name and v.index in self.indices

    def count(self):
        return len(self.indices)


@dataclass(frozen=True)
class GUnnamed(GroundDomain):
    type: UnnamedDef

    def is_finite(self):
        return True

    def enumerate(self):
        yield from self.type.values()

    def member(self, v):
        return isinstance(v, UnnamedV) and v.type.name == self.type.name

    def count(self):
        return self.type.size


@dataclass(frozen=True)
class GTuple(GroundDomain):
    components: tuple[GroundDomain, ...]

    def is_finite(self):
        return all(c.is_finite() for c in self.components)

    def enumerate(self):
        for combo in itertools.product(*(list(c.enumerate()) for c in self.components)):
            yield TupleV(combo)

    def member(self, v):
        return (isinstance(v, TupleV) and len(v.items) == len(self.components)
                and all(c.member(x) for c, x in zip(self.components, v.items)))

    def count(self):
        return _prod(c.count() for c in self.components)


@dataclass(frozen=True)
class GRecord(GroundDomain):
    fields: tuple[tuple[str, GroundDomain], ...]  # sorted by name

    def is_finite(self):
        return all(d.is_finite() for _, d in self.fields)

    def enumerate(self):
        names = [n for n, _ in self.fields]
        for combo in itertools.product(*(list(d.enumerate()) for _, d in self.fields)):
            yield RecordV(zip(names, combo))

    def member(self, v):
        return (isinstance(v, RecordV) and [n for n, _ in v.fields] == [n for n, _ in self.fields]
                and all(d.member(x) for (_, d), (_, x) in zip(self.fields, v.fields)))

    def count(self):
        return _prod(d.count() for _, d in self.fields)


@dataclass(frozen=True)
class GVariant(GroundDomain):
    fields: tuple[tuple[str, GroundDomain], ...]  # sorted by name

    def is_finite(self):
        return all(d.is_finite() for _, d in self.fields)

    def enumerate(self):
        for n, d in self.fields:
            for x in d.enumerate():
                yield VariantV(n, x)

    def member(self, v):
        return isinstance(v, VariantV) and any(n == v.name and d.member(v.value) for n, d in self.fields)

    def count(self):
        cs = [d.count() for _, d in self.fields]
        return None if None in cs else sum(cs)


@dataclass(frozen=True)
class GMatrix(GroundDomain):
    """One index dimension; ``matrix indexed by [A, B] of E`` nests as A of (B of E)."""
    index: GroundDomain
    element: GroundDomain
    index_ast: object = field(default=None, compare=False)

    def index_values(self) -> list[Value]:
        return list(self.index.enumerate())

    def is_finite(self):
        return self.index.is_finite() and self.element.is_finite()

    def enumerate(self):
        idx = self.index_values()
        for combo in itertools.product(*([list(self.element.enumerate())] * len(idx))):
            yield MatrixV(idx, combo, self.index_ast)

    def member(self, v):
        return (isinstance(v, MatrixV) and self.index.is_finite()
                and [vkey(i) for i in v.index] == [vkey(i) for i in self.index.enumerate()]
                and all(self.element.member(x) for x in v.entries))

    def count(self):
        n, k = self.index.count(), self.element.count()
        return None if n is None or k is None else k ** n


def _size_bounds(a: dict, lo_key="minSize", hi_key="maxSize", exact="size") -> tuple[int, int | None]:
    """Combined lower/upper bound; contradictory attributes give lo > hi."""
    los = [a[k] for k in (exact, lo_key) if a.get(k) is not None]
    his = [a[k] for k in (exact, hi_key) if a.get(k) is not None]
    return (max(los) if los else 0), (min(his) if his else None)


def _prod(xs) -> int | None:
    out = 1
    for x in xs:
        if x is None:
            return None
        out *= x
    return out


def _list_lex(elements: list, lo: int, hi: int | None, repeat: int = 1) -> Iterator[list]:
    """Sorted sub-lists of `elements`, each used at most `repeat` times, in list-lex order."""
    n = len(elements)
    cap = n * repeat if hi is None else hi

    def go(cur: list, last: int, used: int):
        if len(cur) >= lo:
            yield list(cur)
        if len(cur) >= cap:
            return
        for j in range(max(last, 0), n):
            if j == last and used >= repeat:
                continue
            cur.append(elements[j])
            yield from go(cur, j, used + 1 if j == last else 1)
            cur.pop()

    yield from go([], -1, 0)


@dataclass(frozen=True)
class GSet(GroundDomain):
    attrs: GAttrs
    element: GroundDomain

    def is_finite(self):
        return self.element.is_finite()

    def enumerate(self):
        lo, hi = _size_bounds(_amap(self.attrs))
        for items in _list_lex(list(self.element.enumerate()), lo, hi):
            yield SetV(items)

    def member(self, v):
        if not isinstance(v, SetV) or not all(self.element.member(x) for x in v.items):
            return False
        lo, hi = _size_bounds(_amap(self.attrs))
        return lo <= len(v) and (hi is None or len(v) <= hi)

    def count(self):
        n = self.element.count()
        if n is None:
            return None
        lo, hi = _size_bounds(_amap(self.attrs))
        hi = n if hi is None else min(hi, n)
        return sum(math.comb(n, k) for k in range(lo, hi + 1))


@dataclass(frozen=True)
class GMSet(GroundDomain):
    attrs: GAttrs
    element: GroundDomain

    def _bounds(self):
        a = _amap(self.attrs)
        lo, hi = _size_bounds(a)
        occ_lo, occ_hi = a.get("minOccur") or 0, a.get("maxOccur")
        return lo, hi, occ_lo, occ_hi

    def is_finite(self):
        _, hi, _, occ_hi = self._bounds()
        return self.element.is_finite() and (hi is not None or occ_hi is not None)

    def enumerate(self):
        if not self.is_finite():
            raise EvalError("infinite-domain", "multi-set domain needs size, maxSize or maxOccur")
        lo, hi, occ_lo, occ_hi = self._bounds()
        elems = list(self.element.enumerate())
        repeat = occ_hi if occ_hi is not None else (hi if hi is not None else 0)
        if hi is None:
            hi = len(elems) * repeat
        repeat = min(repeat, hi) if hi is not None else repeat
        candidates = _list_lex(elems, lo, hi, repeat) if repeat > 0 else ([[]] if lo == 0 else [])
        for items in candidates:
            m = MSetV(items)
            if all(c >= occ_lo for _, c in m.counts()):
                yield m

    def member(self, v):
        if not isinstance(v, MSetV) or not all(self.element.member(x) for x in v.items):
            return False
        lo, hi, occ_lo, occ_hi = self._bounds()
        if len(v) < lo or (hi is not None and len(v) > hi):
            return False
        return all(c >= occ_lo and (occ_hi is None or c <= occ_hi) for _, c in v.counts())

    def count(self):
        if not self.is_finite():
            return None
        n = self.element.count()
        lo, hi, _, occ_hi = self._bounds()
        per = occ_hi if occ_hi is not None else hi
        return (per + 1) ** n


@dataclass(frozen=True)
class GFunction(GroundDomain):
    attrs: GAttrs
    source: GroundDomain
    target: GroundDomain

    def flags(self) -> dict:
        return _amap(self.attrs)

    def is_total(self) -> bool:
        a = self.flags()
        return "total" in a or "bijective" in a

    def is_finite(self):
        return self.source.is_finite() and self.target.is_finite()

    def enumerate(self):
        keys = list(self.source.enumerate())
        targets = list(self.target.enumerate())
        if self.is_total():
            for combo in itertools.product(targets, repeat=len(keys)):
                f = FunctionV(zip(keys, combo))
                if self._attrs_ok(f):
                    yield f
            return
        a = self.flags()
        lo, hi = _size_bounds(a)

        def go(start: int, cur: list):
            if len(cur) >= lo:
                f = FunctionV(cur)
                if self._attrs_ok(f):
                    yield f
            if hi is not None and len(cur) >= hi:
                return
            for i in range(start, len(keys)):
                for t in targets:
                    cur.append((keys[i], t))
                    yield from go(i + 1, cur)
                    cur.pop()

        yield from go(0, [])

    def _attrs_ok(self, f: FunctionV) -> bool:
        a = self.flags()
        lo, hi = _size_bounds(a)
        if len(f) < lo or (hi is not None and len(f) > hi):
            return False
        if self.is_total() and not all(f.defined(k) for k in self.source.enumerate()):
            return False
        vals = [v for _, v in f.pairs]
        if ("injective" in a or "bijective" in a) and len({vkey(v) for v in vals}) != len(vals):
            return False
        if "surjective" in a or "bijective" in a:
            if {vkey(v) for v in vals} != {vkey(t) for t in self.target.enumerate()}:
                return False
        return True

    def member(self, v):
        if not isinstance(v, FunctionV):
            return False
        if not all(self.source.member(k) and self.target.member(x) for k, x in v.pairs):
            return False
        return self._attrs_ok(v)

    def count(self):
        n, k = self.source.count(), self.target.count()
        if n is None or k is None:
            return None
        return k ** n if self.is_total() else (k + 1) ** n


@dataclass(frozen=True)
class GSequence(GroundDomain):
    attrs: GAttrs
    element: GroundDomain

    def is_finite(self):
        _, hi = _size_bounds(_amap(self.attrs))
        return self.element.is_finite() and hi is not None

    def enumerate(self):
        if not self.is_finite():
            raise EvalError("infinite-domain", "sequence domain needs size or maxSize")
        lo, hi = _size_bounds(_amap(self.attrs))
        elems = list(self.element.enumerate())

        def go(cur: list):
            if len(cur) >= lo:
                s = SequenceV(cur)
                if self._attrs_ok(s):
                    yield s
            if len(cur) == hi:
                return
            for e in elems:
                cur.append(e)
                yield from go(cur)
                cur.pop()

        yield from go([])

    def _attrs_ok(self, s: SequenceV) -> bool:
        a = _amap(self.attrs)
        lo, hi = _size_bounds(a)
        if len(s) < lo or (hi is not None and len(s) > hi):
            return False
        keys = [vkey(x) for x in s.items]
        if ("injective" in a or "bijective" in a) and len(set(keys)) != len(keys):
            return False
        if "surjective" in a or "bijective" in a:
            if set(keys) != {vkey(e) for e in self.element.enumerate()}:
                return False
        return True

    def member(self, v):
        return (isinstance(v, SequenceV) and all(self.element.member(x) for x in v.items)
                and self._attrs_ok(v))

    def count(self):
        if not self.is_finite():
            return None
        k = self.element.count()
        _, hi = _size_bounds(_amap(self.attrs))
        return sum(k ** i for i in range(hi + 1))


@dataclass(frozen=True)
class GRelation(GroundDomain):
    attrs: GAttrs
    components: tuple[GroundDomain, ...]

    def is_finite(self):
        return all(c.is_finite() for c in self.components)

    def enumerate(self):
        a = _amap(self.attrs)
        lo, hi = _size_bounds(a)
        tuples = list(GTuple(self.components).enumerate())
        for items in _list_lex(tuples, lo, hi):
            r = RelationV(items)
            if relation_flags_ok(r, a, self.components):
                yield r

    def member(self, v):
        if not isinstance(v, RelationV):
            return False
        t = GTuple(self.components)
        if not all(t.member(x) for x in v.items):
            return False
        a = _amap(self.attrs)
        lo, hi = _size_bounds(a)
        if len(v) < lo or (hi is not None and len(v) > hi):
            return False
        return relation_flags_ok(v, a, self.components)

    def count(self):
        n = GTuple(self.components).count()
        return None if n is None else 2 ** n


def relation_flags_ok(r: RelationV, a: dict, components) -> bool:
    from .ast import BINARY_RELATION_ATTRS
    flags = [f for f in a if f in BINARY_RELATION_ATTRS]
    if not flags:
        return True
    if len(components) != 2 or components[0] != components[1]:
        raise EvalError("arity-mismatch",
                        "binary relation attributes need two identical component domains")
    xs = list(components[0].enumerate())
    rel = {(vkey(t.items[0]), vkey(t.items[1])) for t in r.items}
    ks = [vkey(x) for x in xs]

    def R(x, y):
        return (x, y) in rel

    checks = {
        "reflexive": lambda: all(R(x, x) for x in ks),
        "irreflexive": lambda: not any(R(x, x) for x in ks),
        "coreflexive": lambda: all(x == y for x, y in rel),
        "symmetric": lambda: all(R(y, x) for x, y in rel),
        "antiSymmetric": lambda: all(x == y or not R(y, x) for x, y in rel),
        "aSymmetric": lambda: all(not R(y, x) for x, y in rel),
        "transitive": lambda: all(R(x, z) for x, y in rel for y2, z in rel if y == y2),
        "total": lambda: all(R(x, y) or R(y, x) for x in ks for y in ks),
        "connex": lambda: all(x == y or R(x, y) or R(y, x) for x in ks for y in ks),
        "Euclidean": lambda: all(R(y, z) for x, y in rel for x2, z in rel if x == x2),
        "serial": lambda: all(any(R(x, y) for y in ks) for x in ks),
    }
    checks["equivalence"] = lambda: checks["reflexive"]() and checks["symmetric"]() and checks["transitive"]()
    checks["partialOrder"] = lambda: (checks["reflexive"]() and checks["antiSymmetric"]()
                                      and checks["transitive"]())
    return all(checks[f]() for f in flags)


def set_partitions(items: list) -> Iterator[list[list]]:
    """All partitions of `items` into non-empty blocks (restricted growth order)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


@dataclass(frozen=True)
class GPartition(GroundDomain):
    """Partitions whose participants are exactly the element domain."""
    attrs: GAttrs
    element: GroundDomain

    def is_finite(self):
        return self.element.is_finite()

    def enumerate(self):
        elems = list(self.element.enumerate())
        parts = [PartitionV(p) for p in set_partitions(elems)]
        for p in sorted(parts, key=vkey):
            if self._attrs_ok(p):
                yield p

    def _attrs_ok(self, p: PartitionV) -> bool:
        a = _amap(self.attrs)
        lo, hi = _size_bounds(a, "minNumParts", "maxNumParts", "numParts")
        if len(p) < lo or (hi is not None and len(p) > hi):
            return False
        plo, phi = _size_bounds(a, "minPartSize", "maxPartSize", "partSize")
        sizes = [len(q) for q in p.parts]
        if any(s < plo or (phi is not None and s > phi) for s in sizes):
            return False
        if "regular" in a and len(set(sizes)) > 1:
            return False
        return True

    def member(self, v):
        if not isinstance(v, PartitionV):
            return False
        if not self.element.is_finite():
            return all(self.element.member(x) for q in v.parts for x in q.items) and self._attrs_ok(v)
        base = {vkey(x) for x in self.element.enumerate()}
        got = {vkey(x) for q in v.parts for x in q.items}
        return got == base and self._attrs_ok(v)

    def count(self):
        n = self.element.count()
        return None if n is None else bell(n)


def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


# ---------------------------------------------------------------- module API

def is_finite(d: GroundDomain) -> bool:
    return d.is_finite()


def enumerate_domain(d: GroundDomain) -> Iterator[Value]:
    if not d.is_finite():
        raise EvalError("infinite-domain", "domain is not finite")
    return d.enumerate()


def member(v: Value, d: GroundDomain) -> bool:
    return d.member(v)


def attribute_check(v: Value, d: GroundDomain) -> bool:
    """Whether `v` meets the attributes of `d` (component membership included)."""
    return d.member(v)


def ground(domain, env) -> GroundDomain:
    from .evaluator import ground_domain
    return ground_domain(domain, env)
