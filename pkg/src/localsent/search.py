"""Backtracking model search over partially defined structures.

Formulas are compiled to closures that evaluate in three-valued logic over
partial tables: a result is ``True``, ``False`` or the key ``(symbol, args)``
of an undefined cell that blocks evaluation.  Ground instances of each clause
are parked on the cell that blocks them and re-evaluated only when that cell
is assigned (a watched-literal scheme), so a branch is cut as soon as any
instance becomes false.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

from .logic import (
    And, App, Bottom, Const, Eq, Formula, Iff, Implies, Lt, Not, Or, Rel, Sentence,
    Signature, Top, Var, atom_terms, flatten_and, formula_vars, iter_atoms, subst_formula,
)
from .structures import (
    FiniteStructure, closure, eval_sentence, restrict,
)


class BudgetExceeded(RuntimeError):
    """The node budget ran out before the search space was covered."""

    def __init__(self, nodes: int):
        super().__init__(f"search budget exceeded after {nodes} nodes")
        self.nodes = nodes


DEFAULT_BUDGET = 2_000_000


# -- compilation ------------------------------------------------------------


def compile_term(t, tables, rank):
    if isinstance(t, Var):
        i = t.index
        return lambda env: env[i]
    if isinstance(t, Const):
        tab = tables[t.name]
        key = (t.name, ())

        def ev_const(env):
            v = tab.get(())
            return key if v is None else v

        return ev_const
    fn = t.fn
    tab = tables[fn]
    subs = [compile_term(a, tables, rank) for a in t.args]
    if len(subs) == 1:
        (g,) = subs

        def ev_unary(env):
            a = g(env)
            if a.__class__ is tuple:
                return a
            args = (a,)
            v = tab.get(args)
            return (fn, args) if v is None else v

        return ev_unary

    def ev_app(env):
        args = []
        for g in subs:
            a = g(env)
            if a.__class__ is tuple:
                return a
            args.append(a)
        args = tuple(args)
        v = tab.get(args)
        return (fn, args) if v is None else v

    return ev_app


def compile_formula(f: Formula, tables, rank):
    if isinstance(f, Top):
        return lambda env: True
    if isinstance(f, Bottom):
        return lambda env: False
    if isinstance(f, (Eq, Lt)):
        L = compile_term(f.left, tables, rank)
        R = compile_term(f.right, tables, rank)
        if isinstance(f, Eq):
            def ev_eq(env):
                a = L(env)
                if a.__class__ is tuple:
                    return a
                b = R(env)
                if b.__class__ is tuple:
                    return b
                return a == b

            return ev_eq

        def ev_lt(env):
            a = L(env)
            if a.__class__ is tuple:
                return a
            b = R(env)
            if b.__class__ is tuple:
                return b
            return rank[a] < rank[b]

        return ev_lt
    if isinstance(f, Rel):
        name = f.name
        tab = tables[name]
        subs = [compile_term(a, tables, rank) for a in f.args]

        def ev_rel(env):
            args = []
            for g in subs:
                a = g(env)
                if a.__class__ is tuple:
                    return a
                args.append(a)
            args = tuple(args)
            v = tab.get(args)
            return (name, args) if v is None else v

        return ev_rel
    if isinstance(f, Not):
        g = compile_formula(f.arg, tables, rank)

        def ev_not(env):
            r = g(env)
            if r is True:
                return False
            if r is False:
                return True
            return r

        return ev_not
    if isinstance(f, And):
        subs = [compile_formula(a, tables, rank) for a in f.args]

        def ev_and(env):
            unk = None
            for g in subs:
                r = g(env)
                if r is False:
                    return False
                if r is not True and unk is None:
                    unk = r
            return True if unk is None else unk

        return ev_and
    if isinstance(f, Or):
        subs = [compile_formula(a, tables, rank) for a in f.args]

        def ev_or(env):
            unk = None
            for g in subs:
                r = g(env)
                if r is True:
                    return True
                if r is not False and unk is None:
                    unk = r
            return False if unk is None else unk

        return ev_or
    if isinstance(f, Implies):
        L = compile_formula(f.left, tables, rank)
        R = compile_formula(f.right, tables, rank)

        def ev_imp(env):
            a = L(env)
            if a is False:
                return True
            b = R(env)
            if b is True:
                return True
            if a is True:
                return b
            return a

        return ev_imp
    if isinstance(f, Iff):
        L = compile_formula(f.left, tables, rank)
        R = compile_formula(f.right, tables, rank)

        def ev_iff(env):
            a = L(env)
            b = R(env)
            if a.__class__ is bool and b.__class__ is bool:
                return a == b
            return a if a.__class__ is not bool else b

        return ev_iff
    raise TypeError(f"not a formula: {f!r}")


@dataclass(frozen=True)
class Clause:
    """A top-level conjunct with its variables renumbered to ``0..arity-1``."""

    formula: Formula
    arity: int


def _pure_order(f: Formula) -> bool:
    for a in iter_atoms(f):
        if isinstance(a, Rel):
            return False
        if not all(isinstance(t, Var) for t in atom_terms(a)):
            return False
    return True


def _order_valid(f: Formula, arity: int) -> bool:
    from .structures import eval_formula, make_structure

    M = make_structure(Signature(), max(arity, 1))
    return all(eval_formula(M, f, env) for env in itertools.product(range(max(arity, 1)), repeat=arity))


def split_clauses(s: Sentence) -> list[Clause]:
    """Top-level conjuncts, each over its own variables.

    Conjuncts that mention only variables, ``<`` and ``=`` and are valid in
    every linear order are dropped; the representation makes them true.
    """
    out = []
    for c in flatten_and(s.matrix):
        vs = sorted(formula_vars(c))
        ren = {v: Var(i) for i, v in enumerate(vs)}
        g = subst_formula(c, ren)
        if _pure_order(g) and _order_valid(g, len(vs)):
            continue
        out.append(Clause(g, len(vs)))
    return out


# -- fixed-size enumeration ---------------------------------------------------


def cell_order(sig: Signature, size: int) -> list[tuple[str, tuple]]:
    """Search order: relations (by arity), then constants, then functions (by arity)."""
    cells = []
    for name, ar in sorted(sig.relations, key=lambda p: p[1]):
        cells += [(name, args) for args in itertools.product(range(size), repeat=ar)]
    cells += [(c, ()) for c in sig.constants]
    for name, ar in sorted(sig.functions, key=lambda p: p[1]):
        cells += [(name, args) for args in itertools.product(range(size), repeat=ar)]
    return cells


@dataclass
class SearchStats:
    nodes: int = 0
    prunes: int = 0


class ModelSearch:
    """Enumerates all models of ``s`` with domain ``0..size-1`` in a fixed cell order."""

    def __init__(self, s: Sentence, size: int, budget: int = DEFAULT_BUDGET, stats: SearchStats | None = None):
        self.s = s
        self.sig = s.signature
        self.size = size
        self.budget = budget
        self.stats = stats or SearchStats()
        self.tables: dict[str, dict] = {
            n: {} for n in [f for f, _ in self.sig.functions] + [r for r, _ in self.sig.relations] + list(self.sig.constants)
        }
        self.rank = list(range(size))
        self.clauses = split_clauses(s)
        self.evals = [compile_formula(c.formula, self.tables, self.rank) for c in self.clauses]
        self.cells = cell_order(self.sig, size)
        self.rel_names = {r for r, _ in self.sig.relations}
        self.watch: dict[tuple, list] = {}
        self.consistent = self._initial()

    def _initial(self) -> bool:
        for ci, c in enumerate(self.clauses):
            ev = self.evals[ci]
            for env in itertools.product(range(self.size), repeat=c.arity):
                r = ev(env)
                if r is False:
                    return False
                if r is not True:
                    self.watch.setdefault(r, []).append((ci, env))
        return True

    def _assign(self, cell, value):
        """Set ``cell``; returns the undo record or None on conflict (already undone)."""
        name, args = cell
        self.tables[name][args] = value
        pending = self.watch.pop(cell, [])
        moved = []
        evals = self.evals
        watch = self.watch
        for ci, env in pending:
            r = evals[ci](env)
            if r is True:
                continue
            if r is False:
                self._undo(cell, pending, moved)
                return None
            watch.setdefault(r, []).append((ci, env))
            moved.append(r)
        return pending, moved

    def _undo(self, cell, pending, moved):
        for key in reversed(moved):
            self.watch[key].pop()
        if pending:
            self.watch[cell] = pending
        del self.tables[cell[0]][cell[1]]

    def _options(self, cell):
        if cell[0] in self.rel_names:
            return (False, True)
        return range(self.size)

    def models(self) -> Iterator[FiniteStructure]:
        if not self.consistent:
            return
        self.unassigned = dict.fromkeys(self.cells)
        yield from self._rec()

    def _pick(self):
        """Fail-first: the undecided cell blocking the most clause instances (ties by cell order)."""
        best, best_score = None, -1
        watch = self.watch
        for cell in self.unassigned:
            score = len(watch.get(cell, ()))
            if score > best_score:
                best, best_score = cell, score
        return best

    def _rec(self):
        if not self.unassigned:
            yield self.snapshot()
            return
        cell = self._pick()
        del self.unassigned[cell]
        for value in self._options(cell):
            self.stats.nodes += 1
            if self.stats.nodes > self.budget:
                raise BudgetExceeded(self.stats.nodes)
            rec = self._assign(cell, value)
            if rec is None:
                self.stats.prunes += 1
                continue
            yield from self._rec()
            self._undo(cell, *rec)
        self.unassigned[cell] = None
        # restore the static position so later picks break ties identically
        self.unassigned = {c: None for c in self.cells if c in self.unassigned}

    def snapshot(self) -> FiniteStructure:
        fns = {n: dict(self.tables[n]) for n, _ in self.sig.functions}
        rels = {n: [a for a, v in self.tables[n].items() if v] for n, _ in self.sig.relations}
        consts = {c: self.tables[c][()] for c in self.sig.constants}
        return FiniteStructure(self.sig, self.size, fns, rels, consts)


def enumerate_models(s: Sentence, size: int, budget: int = DEFAULT_BUDGET,
                     stats: SearchStats | None = None) -> Iterator[FiniteStructure]:
    return ModelSearch(s, size, budget, stats).models()


def find_model(s: Sentence, size: int, budget: int = DEFAULT_BUDGET,
               stats: SearchStats | None = None) -> FiniteStructure | None:
    return next(enumerate_models(s, size, budget, stats), None)


# -- bounded locality check ---------------------------------------------------


def closure_growth_bound(sig: Signature, generators: int, steps: int) -> int:
    """Largest structure that ``generators`` elements can generate in ``steps`` closure steps."""
    size = generators
    for _ in range(steps):
        size = size + sum(size ** ar for _, ar in sig.functions) + len(sig.constants)
    return size


@dataclass
class LocalityReport:
    passed: bool
    n: int
    m: int
    observed_bound: int | None = None
    models_checked: int = 0
    nodes: int = 0
    budget_exceeded: bool = False
    failure: str | None = None
    counter_model: FiniteStructure | None = None
    counter_set: tuple[int, ...] | None = None
    per_size: dict = field(default_factory=dict)

    def summary(self) -> str:
        if self.budget_exceeded:
            return f"budget exceeded after {self.nodes} nodes (m={self.m})"
        status = "pass" if self.passed else f"fail: {self.failure}"
        return (f"{status}; n={self.n} m={self.m} models={self.models_checked} "
                f"observed_bound={self.observed_bound} nodes={self.nodes}")


def _check_size(args):
    s, n, k, budget = args
    stats = SearchStats()
    out = {"k": k, "models": 0, "bound": None, "failure": None, "nodes": 0, "exceeded": False}
    has_consts = bool(s.signature.constants)
    try:
        for M in enumerate_models(s, k, budget, stats):
            out["models"] += 1
            seen: dict[frozenset, bool] = {}
            for r in range(0 if has_consts else 1, k + 1):
                for X in itertools.combinations(range(k), r):
                    tr = closure(M, X)
                    step = tr.step
                    out["bound"] = step if out["bound"] is None else max(out["bound"], step)
                    if step > n:
                        out["failure"] = (f"closure of {set(X)} needs {step} steps", M, X)
                        return out
                    cl = tr.closure
                    if cl not in seen:
                        seen[cl] = eval_sentence(restrict(M, cl).structure, s)
                    if not seen[cl]:
                        out["failure"] = (f"closure of {set(X)} is not a model", M, X)
                        return out
    except BudgetExceeded:
        out["exceeded"] = True
    finally:
        out["nodes"] = stats.nodes
    return out


def _run(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def verify_local_on_bounded_models(s: Sentence, n: int, m: int | None = None, budget: int = DEFAULT_BUDGET,
                                   workers: int = 1) -> LocalityReport:
    """Check locality with closure bound ``n`` on every model of size <= ``m``.

    ``m`` defaults to the size that ``q`` elements can generate in ``n+1`` steps.
    The budget applies per domain size.  Results are folded in size order, so
    the report does not depend on ``workers``.
    """
    if m is None:
        m = closure_growth_bound(s.signature, max(s.q, 1), n + 1)
    report = LocalityReport(passed=True, n=n, m=m)
    results = _run(_check_size, [(s, n, k, budget) for k in range(1, m + 1)], workers)
    for res in results:
        report.nodes += res["nodes"]
        report.models_checked += res["models"]
        report.per_size[res["k"]] = res["models"]
        if res["bound"] is not None:
            report.observed_bound = max(report.observed_bound or 0, res["bound"])
        if res["exceeded"]:
            report.budget_exceeded = True
            report.passed = False
            return report
        if res["failure"]:
            report.passed = False
            report.failure, report.counter_model, report.counter_set = res["failure"]
            return report
    return report


# -- finite spectra -----------------------------------------------------------


def _spectrum_size(args):
    s, k, budget = args
    stats = SearchStats()
    try:
        return k, find_model(s, k, budget, stats), stats.nodes, False
    except BudgetExceeded:
        return k, None, stats.nodes, True


@dataclass
class SpectrumTable:
    name: str
    ceiling: int
    members: dict[int, bool]
    witnesses: dict[int, FiniteStructure]
    nodes: int = 0
    budget_exceeded: list[int] = field(default_factory=list)

    def sizes(self) -> set[int]:
        return {k for k, v in self.members.items() if v}


def finite_spectrum(s: Sentence, ceiling: int, budget: int = DEFAULT_BUDGET, workers: int = 1,
                    name: str = "") -> SpectrumTable:
    """Which sizes ``1..ceiling`` carry a model of ``s`` (exhaustive per size)."""
    table = SpectrumTable(name, ceiling, {}, {})
    for k, M, nodes, exceeded in _run(_spectrum_size, [(s, k, budget) for k in range(1, ceiling + 1)], workers):
        table.nodes += nodes
        if exceeded:
            table.budget_exceeded.append(k)
            continue
        table.members[k] = M is not None
        if M is not None:
            table.witnesses[k] = M
    return table
