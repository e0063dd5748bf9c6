"""Certification, indiscernibility checks and the indiscernible-witness search.

A witness is a finite model generated within ``n`` closure steps by an
increasing sequence of generators that is indiscernible (``plain``) or, for
unary signatures, additionally satisfies the two tail conditions (``special``).
Existence of such a model with the right number of generators decides whether
a local sentence has arbitrarily large finite models (plain) or an ω-model
(special).
"""

from __future__ import annotations

import itertools
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .logic import Metrics, Sentence, Signature, compute_metrics
from .search import (
    DEFAULT_BUDGET, BudgetExceeded, LocalityReport, compile_formula, split_clauses,
    verify_local_on_bounded_models,
)
from .structures import (
    FiniteStructure, StructureError, closure, dump_structure, eval_sentence, load_structure,
)


class UnarySignatureError(ValueError):
    """Raised for special indiscernibles or ω-questions over non-unary signatures."""


class NotLocalError(ValueError):
    def __init__(self, report: LocalityReport):
        super().__init__(f"locality check failed: {report.failure}")
        self.report = report


class UncertifiedError(TypeError):
    pass


# -- certification ------------------------------------------------------------


@dataclass(frozen=True)
class LocalCertificate:
    sentence: Sentence
    n: int
    metrics: Metrics
    m: int
    report: LocalityReport

    @property
    def N(self) -> int:
        return self.metrics.N


def certify(s: Sentence, n: int, m: int | None = None, budget: int = DEFAULT_BUDGET,
            workers: int = 1) -> LocalCertificate:
    """Check locality with bound ``n`` on all models up to size ``m`` and attach the metrics."""
    report = verify_local_on_bounded_models(s, n, m, budget, workers)
    if report.budget_exceeded:
        raise BudgetExceeded(report.nodes)
    if not report.passed:
        raise NotLocalError(report)
    return LocalCertificate(s, n, compute_metrics(s, n), report.m, report)


# -- plain indiscernibility -----------------------------------------------------


def _pair_closure(fns, const_values, start, cap):
    """Pairs (t(a), t(b)) for all terms t of depth <= cap, skipping undefined cells."""
    pairs = set(start)
    pairs.update((c, c) for c in const_values if c is not None)
    for _ in range(cap):
        new = set()
        for ar, tab in fns:
            if ar == 1:
                for a, b in pairs:
                    va = tab.get((a,))
                    vb = tab.get((b,))
                    if va is not None and vb is not None:
                        new.add((va, vb))
            else:
                for combo in itertools.product(pairs, repeat=ar):
                    va = tab.get(tuple(p[0] for p in combo))
                    vb = tab.get(tuple(p[1] for p in combo))
                    if va is not None and vb is not None:
                        new.add((va, vb))
        new -= pairs
        if not new:
            break
        pairs |= new
    return pairs


def _pairs_consistent(pairs, rank, rels) -> bool:
    fwd, back = {}, {}
    for a, b in pairs:
        if fwd.setdefault(a, b) != b or back.setdefault(b, a) != a:
            return False
    ordered = sorted(fwd.items(), key=lambda p: rank[p[0]])
    for (_, b1), (_, b2) in zip(ordered, ordered[1:]):
        if not rank[b1] < rank[b2]:
            return False
    plist = list(fwd.items())
    for ar, tab in rels:
        for combo in itertools.product(plist, repeat=ar):
            va = tab.get(tuple(p[0] for p in combo))
            vb = tab.get(tuple(p[1] for p in combo))
            if va is not None and vb is not None and va != vb:
                return False
    return True


def _plain_ok(fns, rels, const_values, rank, X, cap, max_len) -> bool:
    for m in range(1, min(len(X), max_len) + 1):
        tuples = itertools.combinations(X, m)
        first = next(tuples)
        for other in tuples:
            pairs = _pair_closure(fns, const_values, zip(first, other), cap)
            if not _pairs_consistent(pairs, rank, rels):
                return False
    return True


def _structure_views(M: FiniteStructure):
    fns = [(ar, M.functions[name]) for name, ar in M.signature.functions]
    rels = [(ar, {t: True for t in M.relations[name]}) for name, ar in M.signature.relations]
    # absent tuples are False, not undefined
    rels = [(ar, _TotalRelation(tab)) for ar, tab in rels]
    return fns, rels, list(M.constants.values())


class _TotalRelation:
    __slots__ = ("tab",)

    def __init__(self, tab):
        self.tab = tab

    def get(self, key):
        return key in self.tab


def check_plain_indiscernibles(M: FiniteStructure, X: Sequence[int], cap: int | None = None,
                               max_len: int | None = None) -> bool:
    """Do order-isomorphic tuples from ``X`` satisfy the same atoms over terms of depth <= ``cap``?

    ``cap`` defaults to one more than the closure step of ``X``.  Tuples of
    every length up to ``max_len`` (default ``len(X)``) are compared.
    """
    X = tuple(X)
    if any(a >= b for a, b in zip(X, X[1:])):
        raise ValueError("X must be strictly increasing")
    if len(X) <= 1:
        return True
    if cap is None:
        cap = closure(M, X).step + 1
    fns, rels, consts = _structure_views(M)
    return _plain_ok(fns, rels, consts, range(M.size), X, cap, max_len or len(X))


# -- special indiscernibility ---------------------------------------------------


def _words(names, cap):
    for length in range(1, cap + 1):
        yield from itertools.product(names, repeat=length)


def _apply_word(tabs, word, x):
    for name in word:
        if x is None:
            return None
        x = tabs[name].get((x,))
    return x


def _special_ok(tabs, words, const_values, rank, X) -> bool:
    if len(X) < 2:
        return True
    second = rank[X[1]]
    for c in const_values:
        if c is None:
            continue
        if not rank[c] < second:
            return False
        for w in words:
            v = _apply_word(tabs, w, c)
            if v is not None and not rank[v] < second:
                return False
    for w in words:
        vals = [_apply_word(tabs, w, x) for x in X]
        for i in range(len(X) - 1):
            v = vals[i]
            if v is not None and not rank[v] < rank[X[i + 1]]:
                return False
        for j in range(1, len(X)):
            v = vals[j]
            if v is None:
                continue
            for i in range(j):
                if rank[v] < rank[X[i]]:
                    for k in range(i + 1, len(X)):
                        if vals[k] is not None and vals[k] != v:
                            return False
    return True


def require_unary(sig: Signature, what: str) -> None:
    if not sig.is_unary():
        raise UnarySignatureError(f"{what} needs every function symbol to be unary")


def check_special_indiscernibles(M: FiniteStructure, X: Sequence[int], cap: int | None = None) -> bool:
    """Plain indiscernibility plus the two tail conditions for unary terms of depth <= ``cap``.

    (i)  t(x) < y for generators x < y;
    (ii) t(y) < x for generators x < y forces t(y) = t(z) for every generator z > x.
    Closed terms count as constant functions, so their values must lie below
    the second generator.
    """
    require_unary(M.signature, "special indiscernibility")
    X = tuple(X)
    if cap is None:
        cap = closure(M, X).step
    if not check_plain_indiscernibles(M, X, cap + 1):
        return False
    tabs = {name: M.functions[name] for name, _ in M.signature.functions}
    words = list(_words(sorted(tabs), cap))
    return _special_ok(tabs, words, list(M.constants.values()), range(M.size), X)


# -- witnesses ------------------------------------------------------------------


PLAIN, SPECIAL = "plain", "special"


@dataclass(frozen=True)
class IndiscernibleWitness:
    model: FiniteStructure
    generators: tuple[int, ...]
    kind: str
    steps: int

    def dump(self) -> str:
        return (dump_structure(self.model)
                + f"generators {' '.join(map(str, self.generators))}\n"
                + f"kind {self.kind}\nsteps {self.steps}\n")


def load_witness(text: str, signature: Signature) -> IndiscernibleWitness:
    model = load_structure(text, signature)
    gens, kind, steps = None, PLAIN, None
    for raw in text.splitlines():
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        if parts[0] == "generators":
            gens = tuple(int(x) for x in parts[1:])
        elif parts[0] == "kind":
            kind = parts[1]
        elif parts[0] == "steps":
            steps = int(parts[1])
    if gens is None or steps is None:
        raise StructureError("witness dump needs 'generators' and 'steps' lines")
    return IndiscernibleWitness(model, gens, kind, steps)


def verify_witness(w: IndiscernibleWitness, s: Sentence) -> tuple[bool, str]:
    """Re-check a witness from scratch; returns (ok, reason)."""
    if not eval_sentence(w.model, s):
        return False, "model does not satisfy the sentence"
    gens = w.generators
    if any(a >= b for a, b in zip(gens, gens[1:])) or any(not 0 <= g < w.model.size for g in gens):
        return False, "generators are not an increasing sequence of elements"
    if w.steps < 1:
        return False, "steps must be at least 1"
    tr = closure(w.model, gens)
    if tr.cl(w.steps) != frozenset(w.model.domain):
        return False, f"generators do not generate the model in {w.steps} steps"
    if not check_plain_indiscernibles(w.model, gens, w.steps + 1):
        return False, "generators are not indiscernible"
    if w.kind == SPECIAL and not check_special_indiscernibles(w.model, gens, w.steps):
        return False, "generators are not special indiscernibles"
    return True, "ok"


@dataclass
class FinderStats:
    nodes: int = 0
    prunes: int = 0
    seconds: float = 0.0


@dataclass
class WitnessResult:
    status: str  # "witness" | "exhausted" | "budget-exceeded"
    witness: IndiscernibleWitness | None
    stats: FinderStats
    generators: int


class _Found(Exception):
    def __init__(self, witness):
        self.witness = witness


class _WitnessSearch:
    """Depth-first construction of the term universe generated by ``N`` elements.

    Elements are identified by creation index.  Every undefined cell is either a
    relation atom (decided false/true), a constant or a function application
    (decided as an existing element or as a new element one level deeper,
    inserted into any gap of the current order).  Distinct branches build
    distinct labelled structures, so the search is exhaustive without repeats.
    """

    def __init__(self, s: Sentence, n: int, N: int, kind: str, budget: int, max_len: int, stats):
        self.s = s
        self.sig = s.signature
        self.n = n
        self.N = N
        self.kind = kind
        self.budget = budget
        self.max_len = max_len
        self.stats = stats
        used = s.symbols()
        self.free_fns = [(f, ar) for f, ar in self.sig.functions if f not in used]
        self.free_rels = [(r, ar) for r, ar in self.sig.relations if r not in used]
        self.fns = [(f, ar) for f, ar in self.sig.functions if f in used]
        self.rels = [(r, ar) for r, ar in self.sig.relations if r in used]
        self.consts = list(self.sig.constants)
        self.tables: dict[str, dict] = {name: {} for name, _ in self.fns + self.rels}
        for c in self.consts:
            self.tables[c] = {}
        for name, _ in self.free_fns + self.free_rels:
            self.tables[name] = {}
        self.rank: list[Fraction] = []
        self.level: list[int] = []
        self.clauses = split_clauses(s)
        self.evals = [compile_formula(c.formula, self.tables, self.rank) for c in self.clauses]
        self.watch: dict[tuple, list] = {}
        self.trail: list[tuple] = []
        self.rel_cells: list[tuple] = []
        self.fn_cells: list[list[tuple]] = [[] for _ in range(n + 1)]
        self.fn_views = [(ar, self.tables[f]) for f, ar in self.fns]
        self.rel_views = [(ar, self.tables[r]) for r, ar in self.rels]
        self.const_tabs = [self.tables[c] for c in self.consts]
        self.gens = tuple(range(N))
        if kind == SPECIAL:
            self.word_tabs = {f: self.tables[f] for f, _ in self.fns}
            self.words = list(_words(sorted(self.word_tabs), n))

    # -- trail ---------------------------------------------------------------
    def _undo_to(self, mark: int) -> None:
        trail = self.trail
        while len(trail) > mark:
            rec = trail.pop()
            tag = rec[0]
            if tag == "w":
                self.watch[rec[1]].pop()
            elif tag == "s":
                del self.tables[rec[1]][rec[2]]
            elif tag == "u":
                self.watch[rec[1]] = rec[2]
            else:  # element
                self.rank.pop()
                self.level.pop()
                del self.rel_cells[rec[1]:]
                for L, size in enumerate(rec[2]):
                    del self.fn_cells[L][size:]

    def _park(self, r, inst) -> bool:
        if r is True:
            return True
        if r is False:
            return False
        self.watch.setdefault(r, []).append(inst)
        self.trail.append(("w", r))
        return True

    # -- state changes -------------------------------------------------------
    def _create(self, key: Fraction, lvl: int) -> bool:
        e = len(self.rank)
        self.trail.append(("e", len(self.rel_cells), [len(c) for c in self.fn_cells]))
        self.rank.append(key)
        self.level.append(lvl)
        E = e + 1
        for name, ar in self.rels:
            for args in _tuples_with(e, E, ar):
                self.rel_cells.append((name, args))
        for name, ar in self.fns:
            for args in _tuples_with(e, E, ar):
                L = max(self.level[a] for a in args)
                self.fn_cells[L].append((name, args))
        for name, ar in self.free_fns:
            for args in _tuples_with(e, E, ar):
                self.tables[name][args] = args[0]
                self.trail.append(("s", name, args))
        for ci, c in enumerate(self.clauses):
            ev = self.evals[ci]
            for env in _tuples_with(e, E, c.arity):
                if not self._park(ev(env), (ci, env)):
                    return False
        return True

    def _assign(self, cell, value) -> bool:
        name, args = cell
        self.tables[name][args] = value
        self.trail.append(("s", name, args))
        pending = self.watch.pop(cell, None)
        if not pending:
            return True
        self.trail.append(("u", cell, pending))
        evals = self.evals
        for inst in pending:
            if not self._park(evals[inst[0]](inst[1]), inst):
                return False
        return True

    # -- pruning -------------------------------------------------------------
    def _indiscernible(self) -> bool:
        consts = [t.get(()) for t in self.const_tabs]
        if not _plain_ok(self.fn_views, self.rel_views, consts, self.rank, self.gens, self.n + 1, self.max_len):
            return False
        if self.kind == SPECIAL:
            return _special_ok(self.word_tabs, self.words, consts, self.rank, self.gens)
        return True

    # -- search --------------------------------------------------------------
    def _next_cell(self, ptr):
        """Next undecided cell and the advanced pointer, or (None, ptr)."""
        ri, ci, L, fi = ptr
        if ri < len(self.rel_cells):
            return ("rel", self.rel_cells[ri]), (ri + 1, ci, L, fi)
        if ci < len(self.consts):
            return ("const", (self.consts[ci], ())), (ri, ci + 1, L, fi)
        while L <= self.n:
            if fi < len(self.fn_cells[L]):
                return ("fn", self.fn_cells[L][fi], L), (ri, ci, L, fi + 1)
            L, fi = L + 1, 0
        return None, (ri, ci, L, fi)

    def _gaps(self):
        keys = sorted(self.rank)
        yield keys[0] - 1
        for a, b in zip(keys, keys[1:]):
            yield (a + b) / 2
        yield keys[-1] + 1

    def _options(self, item):
        kind = item[0]
        if kind == "rel":
            return [(False, None), (True, None)]
        new_level = 1 if kind == "const" else item[2] + 1
        opts = [(e, None) for e in range(len(self.rank))]
        if new_level <= self.n:
            opts += [(len(self.rank), (gap, new_level)) for gap in self._gaps()]
        return opts

    def _tick(self):
        self.stats.nodes += 1
        if self.stats.nodes > self.budget:
            raise BudgetExceeded(self.stats.nodes)

    def run(self) -> IndiscernibleWitness | None:
        for g in range(self.N):
            if not self._create(Fraction(g), 0):
                return None
        if not self._indiscernible():
            return None
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 100_000))
        try:
            self._rec((0, 0, 0, 0))
        except _Found as found:
            return found.witness
        finally:
            sys.setrecursionlimit(limit)
        return None

    def _rec(self, ptr) -> None:
        item, nptr = self._next_cell(ptr)
        if item is None:
            w = self._complete()
            if w is not None:
                raise _Found(w)
            self.stats.prunes += 1
            return
        cell = item[1]
        for value, new in self._options(item):
            self._tick()
            mark = self.trail.__len__()
            ok = True
            if new is not None:
                ok = self._create(*new)
            ok = ok and self._assign(cell, value) and self._indiscernible()
            if ok:
                self._rec(nptr)
            else:
                self.stats.prunes += 1
            self._undo_to(mark)

    def _complete(self) -> IndiscernibleWitness | None:
        order = sorted(range(len(self.rank)), key=self.rank.__getitem__)
        pos = {e: i for i, e in enumerate(order)}
        fns = {}
        for name, _ in self.sig.functions:
            fns[name] = {tuple(pos[a] for a in args): pos[v] for args, v in self.tables[name].items()}
        rels = {name: [tuple(pos[a] for a in args) for args, v in self.tables[name].items() if v]
                for name, _ in self.rels}
        consts = {c: pos[self.tables[c][()]] for c in self.consts}
        M = FiniteStructure(self.sig, len(order), fns, rels, consts)
        w = IndiscernibleWitness(M, tuple(pos[g] for g in self.gens), self.kind, self.n)
        ok, _ = verify_witness(w, self.s)
        return w if ok else None


def _tuples_with(e: int, E: int, arity: int):
    """All ``arity``-tuples over ``range(E)`` that contain ``e`` (``e`` = E-1)."""
    for i in range(arity):
        for head in itertools.product(range(e), repeat=i):
            for tail in itertools.product(range(E), repeat=arity - i - 1):
                yield head + (e,) + tail


def find_witness(cert: LocalCertificate, N: int | None = None, kind: str = PLAIN,
                 budget: int = DEFAULT_BUDGET, max_len: int | None = None) -> WitnessResult:
    """Search for a model generated by ``N`` indiscernibles in at most ``cert.n`` steps.

    ``N`` defaults to the certificate's N.  ``exhausted`` means the bounded
    space was covered completely; ``budget-exceeded`` licenses no conclusion.
    Tuples up to length ``max_len`` (default v') are compared, which suffices
    because an atom mentions at most v' generators.
    """
    if not isinstance(cert, LocalCertificate):
        raise UncertifiedError("find_witness needs a LocalCertificate")
    if kind not in (PLAIN, SPECIAL):
        raise ValueError(f"unknown indiscernibility kind {kind!r}")
    if kind == SPECIAL:
        require_unary(cert.sentence.signature, "special indiscernibility")
    N = cert.N if N is None else N
    if N < 1:
        raise ValueError("N must be positive")
    stats = FinderStats()
    start = time.perf_counter()
    search = _WitnessSearch(cert.sentence, cert.n, N, kind, budget,
                            max_len or max(cert.metrics.v_prime, 1), stats)
    try:
        w = search.run()
        status = "witness" if w else "exhausted"
    except BudgetExceeded:
        w, status = None, "budget-exceeded"
    stats.seconds = time.perf_counter() - start
    return WitnessResult(status, w, stats, N)


# -- decisions ----------------------------------------------------------------


QUESTIONS = ("arbitrarily-large-finite", "infinite", "omega-model", "regular-cardinal-model")


@dataclass
class DecisionReport:
    question: str
    answer: str  # "yes" | "no" | "budget-exceeded"
    witness: IndiscernibleWitness | None
    N: int
    kind: str
    nodes: int = 0
    prunes: int = 0
    seconds: float = 0.0
    decided_by: int | None = None
    attempts: list = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"question {self.question}", f"answer {self.answer}", f"kind {self.kind}", f"N {self.N}"]
        for k, status, nodes in self.attempts:
            out.append(f"attempt generators={k} status={status} nodes={nodes}")
        if self.decided_by is not None:
            out.append(f"decided-by generators={self.decided_by}")
        out.append(f"nodes {self.nodes}")
        out.append(f"prunes {self.prunes}")
        return out


def decide(cert: LocalCertificate, question: str, budget: int = DEFAULT_BUDGET, N: int | None = None,
           probes: Sequence[int] = (1, 2, 3)) -> DecisionReport:
    """Answer a model-existence question for a certified local sentence.

    Arbitrarily large finite models and infinite models are equivalent to a
    plain witness with N generators; an ω-model (and a model of any regular
    infinite cardinality) to a special witness.  A witness with N generators
    restricts to one with fewer, so an exhaustive failure at a small probe
    count already answers "no".
    """
    if not isinstance(cert, LocalCertificate):
        raise UncertifiedError("decide needs a LocalCertificate")
    if question not in QUESTIONS:
        raise ValueError(f"unknown question {question!r}; choose from {', '.join(QUESTIONS)}")
    kind = PLAIN
    if question in ("omega-model", "regular-cardinal-model"):
        require_unary(cert.sentence.signature, f"the question {question!r}")
        kind = SPECIAL
    N = cert.N if N is None else N
    report = DecisionReport(question, "budget-exceeded", None, N, kind)

    def attempt(k):
        res = find_witness(cert, k, kind, budget)
        report.nodes += res.stats.nodes
        report.prunes += res.stats.prunes
        report.seconds += res.stats.seconds
        report.attempts.append((k, res.status, res.stats.nodes))
        return res

    for k in probes:
        if k >= N:
            break
        if attempt(k).status == "exhausted":
            report.answer, report.decided_by = "no", k
            return report
    res = attempt(N)
    if res.status == "witness":
        report.answer, report.witness, report.decided_by = "yes", res.witness, N
    elif res.status == "exhausted":
        report.answer, report.decided_by = "no", N
    return report
