"""Instantiation, exhaustive search and solution checking.

Every decision variable is broken into cells (matrix entries, tuple and
record components, one presence cell per possible set element, one cell per
function key; anything else is a single cell over its whole domain). Search
assigns cells depth first, in variable order and then in cell order, trying
options in increasing order. The encoding is chosen so that this order is
exactly the canonical order of the variables' values, which makes the
solution order identical to naive enumerate-then-filter.

Constraints are evaluated symbolically once (see :mod:`essence.symbolic`).
Small ones are turned into tables of allowed tuples and kept generalised
arc consistent by simple tabular reduction; the rest are checked as soon as
their outcome is decided. Pruning never removes a solution: every leaf is
re-checked with the plain evaluator before it is reported.
"""

from __future__ import annotations

import itertools
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

from . import ast as A
from .domains import (GFunction, GMatrix, GRecord, GRelation, GroundDomain,
                      GSet, GTuple, _size_bounds)
from .errors import EvalError, InstantiationError
from .evaluator import Env, Lazy, evaluate, ground_domain
from .printer import print_expr
from .symbolic import (IN, OUT, STOP, UNSET, AndSym, CellSym, FunctionView,
                       LiftSym, MatrixView, NeedsConcrete, RecordView, SetView,
                       Sym, TupleView, Unknown, View, to_sym)
from .values import EnumDef, EnumV, UnnamedDef, Value, vkey

Solution = list  # [(name, value)] in declaration order

TABLE_LIMIT = 20000   # largest cross product turned into a table
SMALL_GAC = 512       # largest product enumerated for non-table constraints


class SolveTimeout(Exception):
    pass


@dataclass
class SolveConfig:
    number_of_solutions: int | None = 1  # None means all
    validate: bool = False
    time_limit: float | None = None


@dataclass
class Instance:
    model: A.Model
    env: Env
    finds: list[tuple[str, GroundDomain]]
    constraints: list[A.Expr]
    objective: tuple[str, A.Expr] | None = None
    branching_order: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def find_domain(self, name: str) -> GroundDomain:
        return dict(self.finds)[name]


# ---------------------------------------------------------------- instantiation

def _bind_enum(env: Env, name: str, members: tuple[str, ...]) -> None:
    t = EnumDef(name, tuple(members))
    env.bind(name, t)
    for i, m in enumerate(members, 1):
        env.bind(m, EnumV(t, i))


def instantiate(model: A.Model, params: list[A.Statement] = ()) -> Instance:
    """Bind parameters, check where clauses and ground every find domain."""
    given: dict[str, A.Statement] = {}
    for p in params:
        name = getattr(p, "name", None)
        if name is None:
            raise InstantiationError("parameter files may only contain letting statements")
        if name in given:
            raise InstantiationError(f"parameter {name} is given twice")
        given[name] = p
    used: set[str] = set()
    env = Env()
    finds: list[tuple[str, GroundDomain]] = []
    decision: set[str] = set()
    constraints: list[A.Expr] = []
    objective = None
    branching: A.Branching | None = None

    def mentions_decision(node) -> bool:
        return bool(A.referenced_names(node) & decision)

    for s in model.statements:
        match s:
            case A.GivenEnum(name):
                p = given.get(name)
                if not isinstance(p, A.LettingEnum):
                    raise InstantiationError(f"no enumerated type given for {name}")
                used.add(name)
                _bind_enum(env, name, p.members)
            case A.Given(names, d):
                for n in names:
                    p = given.get(n)
                    if p is None:
                        raise InstantiationError(f"no value given for parameter {n}")
                    used.add(n)
                    if not isinstance(p, A.LettingExpr):
                        raise InstantiationError(f"parameter {n} must be given a value")
                    try:
                        dom = ground_domain(d, env)
                        v = evaluate(p.expr, env)
                    except EvalError as err:
                        raise InstantiationError(f"parameter {n}: {err}") from None
                    if not dom.member(v):
                        raise InstantiationError(f"value given for {n} is not in its domain")
                    env.bind(n, v)
            case A.LettingExpr(name, e):
                if mentions_decision(e):
                    decision.add(name)
                    env.bind(name, Lazy(e))
                else:
                    try:
                        env.bind(name, evaluate(e, env))
                    except EvalError as err:
                        raise InstantiationError(f"letting {name}: {err}") from None
            case A.LettingDomain(name, d):
                try:
                    env.bind(name, ground_domain(d, env))
                except EvalError as err:
                    raise InstantiationError(f"letting {name}: {err}") from None
            case A.LettingEnum(name, members):
                _bind_enum(env, name, members)
            case A.LettingUnnamed(name, size):
                n = evaluate(size, env)
                if not isinstance(n, int) or n < 0:
                    raise InstantiationError(f"size of {name} must be a non-negative integer")
                env.bind(name, UnnamedDef(name, n))
            case A.Find(names, d):
                try:
                    dom = ground_domain(d, env)
                except EvalError as err:
                    raise InstantiationError(f"domain of {', '.join(names)}: {err}") from None
                if not dom.is_finite():
                    raise InstantiationError(f"domain of {', '.join(names)} is not finite")
                for n in names:
                    finds.append((n, dom))
                    decision.add(n)
                    env.bind(n, _Unassigned(n))
            case A.Where(exprs):
                for e in exprs:
                    try:
                        ok = evaluate(e, env)
                    except EvalError as err:
                        raise InstantiationError(f"where {print_expr(e)}: {err}") from None
                    if ok is not True:
                        raise InstantiationError(f"where clause is false: {print_expr(e)}")
            case A.SuchThat(exprs):
                constraints.extend(exprs)
            case A.Objective(sense, e):
                objective = (sense, e)
            case A.Branching():
                branching = s
    extra = sorted(set(given) - used)
    if extra:
        raise InstantiationError(f"parameter {extra[0]} does not match any given")
    inst = Instance(model, env, finds, constraints, objective)
    names = [n for n, _ in finds]
    order: list[str] = []
    if branching is not None:
        for item in branching.items:
            if isinstance(item, A.Ref) and item.name in names:
                if item.name not in order:
                    order.append(item.name)
            else:
                msg = f"branching expression {print_expr(item)} is ignored by the search"
                inst.warnings.append(msg)
                warnings.warn(msg, stacklevel=2)
    order += [n for n in names if n not in order]
    inst.branching_order = order
    return inst


class _Unassigned:
    """Placeholder bound to a find outside of search."""
    __slots__ = ("name",)

    def __init__(self, name: str) -> None:
        self.name = name


# ---------------------------------------------------------------- concrete checks

def holds(e: A.Expr, env: Env) -> bool:
    """A constraint is satisfied only if it evaluates to true; errors count as false."""
    try:
        return evaluate(e, env) is True
    except EvalError:
        return False


def _objective_value(inst: Instance, env: Env) -> int | None:
    try:
        v = evaluate(inst.objective[1], env)
    except EvalError:
        return None
    return v if isinstance(v, int) and not isinstance(v, bool) else None


def _better(sense: str, v: int, best: int | None) -> bool:
    if best is None:
        return True
    return v < best if sense == "minimising" else v > best


def raw_space(inst: Instance) -> int | None:
    """Size of the unpruned search space (None if unknown)."""
    total = 1
    for _, d in inst.finds:
        c = d.count()
        if c is None:
            return None
        total *= c
    return total


def solve_naive(inst: Instance, cfg: SolveConfig = SolveConfig()) -> list[Solution]:
    """Enumerate every assignment in canonical order and filter. Reference oracle."""
    order = inst.branching_order
    doms = {n: d for n, d in inst.finds}
    out: list[Solution] = []
    best = None
    best_val = None
    decl = [n for n, _ in inst.finds]
    for combo in itertools.product(*(list(doms[n].enumerate()) for n in order)):
        vals = dict(zip(order, combo))
        env = inst.env.rebind(vals)
        if not all(holds(c, env) for c in inst.constraints):
            continue
        sol = [(n, vals[n]) for n in decl]
        if inst.objective is not None:
            v = _objective_value(inst, env)
            if v is not None and _better(inst.objective[0], v, best_val):
                best, best_val = sol, v
            continue
        out.append(sol)
        if cfg.number_of_solutions is not None and len(out) >= cfg.number_of_solutions:
            break
    if inst.objective is not None:
        return [best] if best is not None else []
    return out


# ---------------------------------------------------------------- cells and views

class _Builder:
    def __init__(self) -> None:
        self.opts: list[list] = []
        self.structural: list[Sym] = []

    def cell(self, options: list) -> int:
        self.opts.append(options)
        return len(self.opts) - 1

    def view(self, d: GroundDomain) -> object:
        match d:
            case GMatrix():
                idx = tuple(d.index.enumerate())
                return MatrixView(idx, tuple(self.view(d.element) for _ in idx))
            case GTuple():
                return TupleView(tuple(self.view(c) for c in d.components))
            case GRecord():
                return RecordView(tuple(n for n, _ in d.fields),
                                  tuple(self.view(c) for _, c in d.fields))
            case GSet():
                return self.set_view(list(d.element.enumerate()), dict(d.attrs), False)
            case GRelation():
                v = self.set_view(list(GTuple(d.components).enumerate()), dict(d.attrs), True)
                self.structural.append(LiftSym(d.member, (v.sym(),)))
                return v
            case GFunction():
                return self.function_view(d)
        return CellSym(self.cell(list(d.enumerate())))

    def _chain(self, cids: list[int]) -> None:
        # STOP is absorbing; OUT must be followed by a later element
        for a, b in zip(cids, cids[1:]):
            self.structural.append(LiftSym(_chain_ok, (CellSym(a), CellSym(b))))

    def set_view(self, elems: list, attrs: dict, relation: bool) -> SetView:
        cids = [self.cell([STOP, IN] if i == len(elems) - 1 else [STOP, IN, OUT])
                for i in range(len(elems))]
        self._chain(cids)
        lo, hi = _size_bounds(attrs)
        if lo > 0 or hi is not None:
            self.structural.append(_count_in_range(cids, lo, hi, lambda o: o is IN))
        return SetView(elems, cids, relation)

    def function_view(self, d: GFunction) -> FunctionView:
        keys = list(d.source.enumerate())
        targets = list(d.target.enumerate())
        total = d.is_total()
        if total:
            cids = [self.cell(list(targets)) for _ in keys]
        else:
            cids = [self.cell([STOP] + targets if i == len(keys) - 1 else [STOP] + targets + [OUT])
                    for i in range(len(keys))]
            self._chain(cids)
        a = dict(d.attrs)
        if "injective" in a or "bijective" in a:
            for x, y in itertools.combinations(cids, 2):
                self.structural.append(LiftSym(_distinct_if_defined, (CellSym(x), CellSym(y))))
        lo, hi = _size_bounds(a)
        if not total and (lo > 0 or hi is not None):
            self.structural.append(_count_in_range(cids, lo, hi, _is_defined))
        v = FunctionView(keys, cids, total)
        if "surjective" in a or "bijective" in a:
            self.structural.append(LiftSym(d.member, (v.sym(),)))
        return v


def _is_defined(o: object) -> bool:
    return o is not STOP and o is not OUT


def _chain_ok(a: object, b: object) -> bool:
    if a is STOP:
        return b is STOP
    if a is OUT:
        return b is not STOP
    return True


def _distinct_if_defined(a: object, b: object) -> bool:
    if not (_is_defined(a) and _is_defined(b)):
        return True
    return vkey(a) != vkey(b)


def _count_in_range(cids: list[int], lo: int, hi: int | None, pred: Callable) -> Sym:
    def ok(*os):
        n = sum(1 for o in os if pred(o))
        return lo <= n and (hi is None or n <= hi)
    return LiftSym(ok, tuple(CellSym(c) for c in cids))


def _view_cells(v: object) -> list[int]:
    if isinstance(v, View):
        return v.cells()
    return sorted(v.deps)


def _value_fn(v: object) -> Callable[[list], Value]:
    return to_sym(v).fn()


# ---------------------------------------------------------------- constraints

class _Con:
    __slots__ = ("fn", "deps", "pos", "table")

    def __init__(self, fn: Callable, deps: tuple[int, ...]) -> None:
        self.fn = fn
        self.deps = deps
        self.pos = {d: i for i, d in enumerate(deps)}
        self.table: list[tuple[int, ...]] | None = None


def _split(s: object) -> list[object]:
    """Top-level conjuncts; at constraint level an error is as bad as false."""
    if isinstance(s, AndSym) and s.error is None:
        return [y for x in s.args for y in _split(x)]
    if isinstance(s, AndSym):
        return [False]
    return [s]


class _Search:
    def __init__(self, inst: Instance, cfg: SolveConfig) -> None:
        self.inst = inst
        self.cfg = cfg
        b = _Builder()
        self.views: dict[str, object] = {}
        for name in inst.branching_order:
            self.views[name] = b.view(inst.find_domain(name))
        self.opts = b.opts
        n = len(self.opts)
        self.A: list = [UNSET] * n
        self.dom: list[int] = [(1 << len(o)) - 1 for o in self.opts]
        self.order = list(range(n))
        self.env = inst.env.rebind(self.views)
        self.unsat = False
        self.cons: list[_Con] = []
        self.watch: list[list[int]] = [[] for _ in range(n)]
        syms: list[object] = list(b.structural)
        for c in inst.constraints:
            syms.append(self.symbolic(c))
        for s in syms:
            for part in _split(s):
                self.add(part)
        self.objective_fn = None
        if inst.objective is not None:
            self.objective_fn = _compiled_value(self.symbolic_value(inst.objective[1]))
        self.trail: list = []
        self.solutions: list[Solution] = []
        self.best_val: int | None = None
        self.done = False
        self.deadline = (time.monotonic() + cfg.time_limit) if cfg.time_limit else None
        self.nodes = 0

    # -------------------------------------------------------- setup

    def symbolic_value(self, e: A.Expr) -> object:
        try:
            return evaluate(e, self.env)
        except NeedsConcrete:
            return self.opaque(e, lambda env: evaluate(e, env))

    def symbolic(self, e: A.Expr) -> object:
        try:
            r = evaluate(e, self.env)
        except NeedsConcrete:
            return self.opaque(e, lambda env: holds(e, env))
        except EvalError:
            return False
        return r

    def opaque(self, e: A.Expr, run: Callable[[Env], Value]) -> object:
        names = self._finds_in(e)
        if not names:
            return run(self.inst.env.rebind({}))
        base = self.inst.env
        forced = tuple(to_sym(self.views[n]) for n in names)

        def check(*vals):
            return run(base.rebind(dict(zip(names, vals))))
        return LiftSym(check, forced)

    def _finds_in(self, e: A.Expr) -> list[str]:
        seen: set[str] = set()
        todo = [e]
        while todo:
            for n in A.referenced_names(todo.pop()):
                if n in seen:
                    continue
                seen.add(n)
                if n in self.inst.env:
                    b = self.inst.env.lookup(n)
                    if isinstance(b, Lazy):
                        todo.append(b.expr)
        return [n for n in self.inst.branching_order if n in seen]

    def add(self, s: object) -> None:
        if s is True:
            return
        if not isinstance(s, Sym):
            self.unsat = True
            return
        deps = tuple(sorted(s.deps))
        con = _Con(s.fn(), deps)
        k = len(self.cons)
        self.cons.append(con)
        for d in deps:
            self.watch[d].append(k)
        size = 1
        for d in deps:
            size *= len(self.opts[d])
            if size > TABLE_LIMIT:
                return
        con.table = self.build_table(con)

    def build_table(self, con: _Con) -> list[tuple[int, ...]]:
        A_ = self.A
        fn = con.fn
        out = []
        ranges = [[(1 << i, o) for i, o in enumerate(self.opts[d])] for d in con.deps]
        for combo in itertools.product(*ranges):
            for d, (_, o) in zip(con.deps, combo):
                A_[d] = o
            try:
                ok = fn(A_) is True
            except (EvalError, Unknown):
                ok = False
            if ok:
                out.append(tuple(bit for bit, _ in combo))
        for d in con.deps:
            A_[d] = UNSET
        return out

    # -------------------------------------------------------- state changes

    def set_dom(self, c: int, mask: int, dirty: dict) -> bool:
        old = self.dom[c]
        if mask == old:
            return True
        if mask == 0:
            return False
        self.trail.append((0, c, old, self.A[c]))
        self.dom[c] = mask
        if mask & (mask - 1) == 0 and self.A[c] is UNSET:
            self.A[c] = self.opts[c][mask.bit_length() - 1]
        for k in self.watch[c]:
            dirty.setdefault(k, set()).add(c)
        return True

    def undo(self, mark: int) -> None:
        trail = self.trail
        while len(trail) > mark:
            entry = trail.pop()
            if entry[0] == 0:
                _, c, old, a = entry
                self.dom[c] = old
                self.A[c] = a
            else:
                _, con, table = entry
                con.table = table

    # -------------------------------------------------------- propagation

    def propagate(self, dirty: dict) -> bool:
        while dirty:
            k = next(iter(dirty))
            changed = dirty.pop(k)
            con = self.cons[k]
            ok = self.revise_table(con, changed, dirty) if con.table is not None \
                else self.revise_eval(con, dirty)
            if not ok:
                return False
        return True

    def revise_table(self, con: _Con, changed: set, dirty: dict) -> bool:
        dom = self.dom
        table = con.table
        for c in changed:
            p = con.pos[c]
            m = dom[c]
            table = [t for t in table if t[p] & m]
        if table is not con.table:
            self.trail.append((1, con, con.table))
            con.table = table
        if not table:
            return False
        for p, c in enumerate(con.deps):
            m = dom[c]
            if m & (m - 1) == 0:
                continue
            sup = 0
            for t in table:
                sup |= t[p]
                if sup & m == m:
                    break
            if not self.set_dom(c, m & sup, dirty):
                return False
        return True

    def revise_eval(self, con: _Con, dirty: dict) -> bool:
        A_ = self.A
        free = [d for d in con.deps if A_[d] is UNSET]
        fn = con.fn
        if not free:
            try:
                return fn(A_) is True
            except (EvalError, Unknown):
                return False
        size = 1
        for d in free:
            size *= bin(self.dom[d]).count("1")
        if size > SMALL_GAC:
            try:
                return fn(A_) is True
            except Unknown:
                return True
            except EvalError:
                return False
        doms = [[(1 << i, self.opts[d][i]) for i in _bits(self.dom[d])] for d in free]
        sup = [0] * len(free)
        for combo in itertools.product(*doms):
            for d, (_, o) in zip(free, combo):
                A_[d] = o
            try:
                ok = fn(A_) is True
            except (EvalError, Unknown):
                ok = False
            if ok:
                for j, (bit, _) in enumerate(combo):
                    sup[j] |= bit
        for d in free:
            A_[d] = UNSET
        for d, s in zip(free, sup):
            if not self.set_dom(d, self.dom[d] & s, dirty):
                return False
        return True

    def bound_ok(self) -> bool:
        if self.objective_fn is None or self.best_val is None:
            return True
        try:
            v = self.objective_fn(self.A)
        except Unknown:
            return True
        except EvalError:
            return False
        return _better(self.inst.objective[0], v, self.best_val)

    # -------------------------------------------------------- search

    def run(self) -> list[Solution]:
        if self.unsat:
            return []
        dirty = {k: set(con.deps) for k, con in enumerate(self.cons)}
        if not self.propagate(dirty):
            return []
        self.dfs(0)
        return self.solutions

    def dfs(self, pos: int) -> None:
        A_ = self.A
        order = self.order
        n = len(order)
        while pos < n and A_[order[pos]] is not UNSET:
            pos += 1
        if pos == n:
            self.leaf()
            return
        self.nodes += 1
        if self.deadline is not None and self.nodes % 64 == 0 and time.monotonic() > self.deadline:
            raise SolveTimeout("time limit reached")
        c = order[pos]
        for i in _bits(self.dom[c]):
            mark = len(self.trail)
            dirty: dict = {}
            if self.set_dom(c, 1 << i, dirty) and self.propagate(dirty) and self.bound_ok():
                self.dfs(pos + 1)
            self.undo(mark)
            if self.done:
                return

    def leaf(self) -> None:
        inst = self.inst
        vals = {n: _value_fn(v)(self.A) for n, v in self.views.items()}
        for n, d in inst.finds:
            if not d.member(vals[n]):
                return
        env = inst.env.rebind(vals)
        if not all(holds(c, env) for c in inst.constraints):
            return
        sol = [(n, vals[n]) for n, _ in inst.finds]
        if inst.objective is not None:
            v = _objective_value(inst, env)
            if v is not None and _better(inst.objective[0], v, self.best_val):
                self.best_val = v
                self.solutions = [sol]
            return
        self.solutions.append(sol)
        k = self.cfg.number_of_solutions
        if k is not None and len(self.solutions) >= k:
            self.done = True


def _compiled_value(v: object) -> Callable[[list], Value]:
    if isinstance(v, Sym):
        return v.fn()
    return lambda A: v


def _bits(m: int) -> list[int]:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return out


def solve(inst: Instance, cfg: SolveConfig = SolveConfig()) -> list[Solution]:
    """Solutions in canonical order; with an objective, the first optimal one only."""
    sols = _Search(inst, cfg).run()
    if cfg.validate:
        for sol in sols:
            problems = check_solution(inst, dict(sol))
            if problems:
                raise AssertionError("solver produced an invalid solution: " + "; ".join(problems))
    return sols


# ---------------------------------------------------------------- validation

def check_solution(inst: Instance, values: dict[str, Value]) -> list[str]:
    """Every way the assignment fails the instance; empty when it is a solution."""
    problems: list[str] = []
    for n, d in inst.finds:
        if n not in values:
            problems.append(f"no value for {n}")
        elif not d.member(values[n]):
            problems.append(f"value of {n} is not in its domain")
    known = {n for n, _ in inst.finds}
    for n in values:
        if n not in known:
            problems.append(f"{n} is not a decision variable of the model")
    if any(n not in values for n in known):
        return problems
    env = inst.env.rebind(values)
    for c in inst.constraints:
        try:
            r = evaluate(c, env)
        except EvalError as err:
            problems.append(f"constraint {print_expr(c)} cannot be evaluated: {err}")
            continue
        if r is not True:
            problems.append(f"constraint violated: {print_expr(c)}")
    return problems


def solution_values(inst: Instance, statements: list[A.Statement]) -> dict[str, Value]:
    out: dict[str, Value] = {}
    for s in statements:
        if not isinstance(s, A.LettingExpr):
            raise InstantiationError("solution files may only contain value lettings")
        if s.name in out:
            raise InstantiationError(f"{s.name} is bound twice in the solution")
        out[s.name] = evaluate(s.expr, inst.env)
    return out


def validate_solution(model: A.Model, params: list[A.Statement],
                      solution: list[A.Statement]) -> list[str]:
    """Empty list on pass, otherwise one message per violation."""
    inst = instantiate(model, params)
    try:
        values = solution_values(inst, solution)
    except EvalError as err:
        return [f"solution cannot be evaluated: {err}"]
    return check_solution(inst, values)
