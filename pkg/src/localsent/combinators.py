"""Sentence-to-sentence constructions with closure-bound bookkeeping.

Each construction returns a :class:`CombinatorResult` carrying the output
sentence, its closure bound and a provenance trail.  Inputs are used through
the symbols that actually occur in them; new symbols get a fresh name when the
preferred one is taken (``P`` becomes ``P_1`` and so on).

Relativizing a sentence to a guard ``G`` is done conjunct by conjunct, each
conjunct guarded on the variables it uses.  This is equivalent to guarding the
whole matrix on all quantified variables: a conjunct without variables is
guarded on one variable, which keeps it vacuous when ``G`` is empty.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Callable

from .logic import (
    App, Const, Eq, Formula, Implies, Lt, Not, Rel, Sentence, Signature, Term, Var,
    conj, default_var_names, disj, flatten_and, formula_vars, le, map_formula, neq,
    term_min_is,
)
from .parser import parse_formula, parse_sentence


class SymbolClash(ValueError):
    """Input signatures overlap where a construction needs them disjoint."""


class FixtureError(ValueError):
    pass


@dataclass(frozen=True)
class CombinatorResult:
    sentence: Sentence
    n: int
    provenance: tuple[str, ...]

    @property
    def name(self) -> str:
        return self.provenance[0] if self.provenance else ""


# -- helpers ------------------------------------------------------------------


def _fresh(name: str, taken) -> str:
    if name not in taken:
        return name
    k = 1
    while f"{name}_{k}" in taken:
        k += 1
    return f"{name}_{k}"


def _sig(s: Sentence) -> Signature:
    return s.occurring_signature()


def _app(f: str, *args: Term) -> App:
    return App(f, tuple(args))


def _linear_order() -> Formula:
    x, y, z = Var(0), Var(1), Var(2)
    return conj(
        disj(le(x, y), le(y, x)),
        _iff(conj(le(x, y), le(y, x)), Eq(x, y)),
        Implies(conj(le(x, y), le(y, z)), le(x, z)),
    )


def _iff(a: Formula, b: Formula) -> Formula:
    from .logic import Iff

    return Iff(a, b)


def _replace_consts(f: Formula, repl: Callable[[str], Term]) -> Formula:
    def on_term(t):
        if isinstance(t, Const):
            return repl(t.name)
        if isinstance(t, App):
            return App(t.fn, tuple(on_term(a) for a in t.args))
        return t

    return map_formula(f, on_term)


def relativize_clauses(s: Sentence, guard: Callable[[Term], Formula]) -> list[Formula]:
    """The conjuncts of ``s`` with their variables restricted to ``guard``."""
    out = []
    for c in flatten_and(s.matrix):
        vs = sorted(formula_vars(c))
        guards = [guard(Var(v)) for v in vs] or [guard(Var(0))]
        out.append(Implies(conj(*guards), c))
    return out


class _Builder:
    """Accumulates a signature and tagged conjuncts."""

    def __init__(self, *sigs: Signature):
        self.sig = Signature().union(*sigs)
        self.parts: list[tuple[str, Formula]] = []

    def add_symbols(self, functions=(), relations=(), constants=()):
        self.sig = self.sig.union(Signature(tuple(functions), tuple(relations), tuple(constants)))

    def text(self, tag: str, source: str, names=("x", "y", "z")):
        self.parts.append((tag, parse_formula(source, self.sig, names)))

    def add(self, tag: str, f: Formula):
        self.parts.append((tag, f))

    def sentence(self) -> Sentence:
        matrix = conj(*(f for _, f in self.parts))
        q = max((max(formula_vars(f), default=-1) + 1 for _, f in self.parts), default=0)
        return Sentence(self.sig, q, matrix, default_var_names(q, self.sig.symbols()))


def _args(k: int) -> list[Var]:
    return [Var(i) for i in range(k)]


def _closed_under(b: _Builder, tag: str, sig: Signature, guard: Callable[[Term], Formula]) -> None:
    """A guarded region is closed under every function and contains every constant of ``sig``."""
    for f, k in sig.functions:
        xs = _args(k)
        b.add(f"{tag}: region closed under {f}",
              Implies(conj(*(guard(x) for x in xs)), guard(App(f, tuple(xs)))))
    for c in sig.constants:
        b.add(f"{tag}: {c} in region", guard(Const(c)))


def _trivial_outside(b: _Builder, tag: str, sig: Signature, guard: Callable[[Term], Formula]) -> None:
    """Functions of ``sig`` are the first projection as soon as an argument leaves the region."""
    for f, k in sig.functions:
        xs = _args(k)
        b.add(f"{tag}: {f} trivial outside",
              Implies(disj(*(Not(guard(x)) for x in xs)), Eq(App(f, tuple(xs)), xs[0])))


def _relations_inside(b: _Builder, tag: str, sig: Signature, guard: Callable[[Term], Formula]) -> None:
    for r, k in sig.relations:
        xs = _args(k)
        b.add(f"{tag}: {r} inside region", Implies(Rel(r, tuple(xs)), conj(*(guard(x) for x in xs))))


def _injection(b: _Builder, tag: str, fn: str, source: Callable[[Term], Formula],
               target: Callable[[Term], Formula]) -> None:
    """For each ``x`` in the source region, ``fn(x, .)`` injects the source elements below ``x`` into the target."""
    x, y, z = Var(0), Var(1), Var(2)
    b.add(f"{tag}: {fn}(x,y) lands in the target",
          Implies(conj(source(x), source(y), Lt(y, x)), target(_app(fn, x, y))))
    b.add(f"{tag}: {fn}(x,.) is injective below x",
          Implies(conj(source(x), source(y), source(z), Lt(y, z), Lt(z, x)), neq(_app(fn, x, y), _app(fn, x, z))))
    b.add(f"{tag}: {fn} trivial elsewhere",
          Implies(disj(Not(source(x)), Not(source(y)), Not(Lt(y, x))), Eq(_app(fn, x, y), x)))


def _check_disjoint(a: Signature, b: Signature, what: str) -> None:
    common = (a.symbols() & b.symbols()) - {"<"}
    if common:
        raise SymbolClash(f"{what}: shared symbols {sorted(common)}")


# -- star ---------------------------------------------------------------------


def star(phi: CombinatorResult) -> CombinatorResult:
    """Models are ordered sums of models of ``phi``, one per segment of ``I``."""
    return _star(phi)[0]


def _star(phi: CombinatorResult) -> tuple[CombinatorResult, str]:
    s = phi.sentence
    sig = _sig(s)
    I = _fresh("I", sig.symbols())
    # constants become unary functions of the segment
    consts = list(sig.constants)
    base = Signature(sig.functions + tuple((c, 1) for c in consts), sig.relations, ())
    b = _Builder(base)
    b.add_symbols(functions=[(I, 1)])
    b.add("(1) < is a linear order", _linear_order())
    b.text("(2) I picks the first element of each segment",
           f"{I}(y) <= y & (y <= z -> {I}(y) <= {I}(z)) & (({I}(y) <= z & z <= y) -> {I}(z) = {I}(y))",
           ("y", "z"))
    for c in consts:
        b.text(f"(3) {c} is constant on segments", f"{I}(x) = {I}(y) -> {c}(x) = {c}(y)", ("x", "y"))
        b.text(f"{c}(x) stays in the segment of x", f"{I}({c}(x)) = {I}(x)", ("x",))
    for f, k in sig.functions:
        xs = _args(k)
        same = [Eq(_app(I, xs[i]), _app(I, xs[j])) for i in range(k) for j in range(k) if i < j]
        if k > 1:
            b.add(f"(4) {f} is min across segments",
                  Implies(disj(*(Not(e) for e in same)), term_min_is(App(f, tuple(xs)), xs)))
        b.add(f"(5) {f} stays in the segment",
              Implies(conj(*same), Eq(_app(I, App(f, tuple(xs))), _app(I, xs[0]))))
    # (6): relativize phi to the segment of a fresh variable x, constants read at x
    xv = Var(s.q)
    inner = _replace_consts(s.matrix, lambda c: _app(c, xv))
    shifted = Sentence(b.sig, s.q + 1, inner)
    for c in flatten_and(shifted.matrix):
        vs = sorted(v for v in formula_vars(c) if v != s.q)
        guard = conj(*(Eq(_app(I, Var(v)), _app(I, xv)) for v in vs))
        b.add("(6) each segment is a model of phi", Implies(guard, c) if vs else c)
    return CombinatorResult(b.sentence(), phi.n + 1, (f"star({phi.name})",)), I


def star_psi(phi: CombinatorResult, psi: CombinatorResult) -> CombinatorResult:
    """Sums of models of ``phi`` indexed by a model of ``psi`` living on the segment starts."""
    st, I = _star(phi)
    sig_star = _sig(st.sentence)
    sig_psi = _sig(psi.sentence)
    _check_disjoint(sig_star, sig_psi, "star_psi needs S(phi*) and S(psi) to share only <")
    P = _fresh("P", _sig(phi.sentence).symbols() | sig_star.symbols() | sig_psi.symbols())
    b = _Builder(st.sentence.signature, sig_psi)
    b.add_symbols(relations=[(P, 1)])

    def inP(t):
        return Rel(P, (t,))

    for c in flatten_and(st.sentence.matrix):
        b.add("(1) phi*", c)
    b.text("(2) P marks the first element of each segment", f"{P}(x) <-> {I}(x) = x", ("x",))
    for t, k in sig_psi.functions:
        xs = _args(k)
        b.add(f"(3) P closed under {t}", Implies(conj(*(inP(x) for x in xs)), inP(App(t, tuple(xs)))))
    for a in sig_psi.constants:
        b.add(f"(4) P({a})", inP(Const(a)))
    for t, k in sig_psi.functions:
        xs = _args(k)
        b.add(f"(5) {t} is min off P", Implies(disj(*(Not(inP(x)) for x in xs)), term_min_is(App(t, tuple(xs)), xs)))
    _relations_inside(b, "(6)", sig_psi, inP)
    for c in relativize_clauses(psi.sentence, inP):
        b.add("(7) P is a model of psi", c)
    return CombinatorResult(b.sentence(), phi.n + psi.n + 1,
                            (f"star_psi({phi.name}, {psi.name})",) + st.provenance[1:] + psi.provenance[1:])


# -- the phi_n tower ------------------------------------------------------------


PHI0_SIGNATURE = Signature((("f", 2), ("p1", 1), ("p2", 1)), (("P", 1),), ())


def _wrap_level(inner: CombinatorResult, Q: str, g: str, label: str,
                confine_relations: bool = False) -> CombinatorResult:
    """Put ``inner`` on an initial segment Q and inject the segments of the rest into Q.

    With ``confine_relations`` the relations of ``inner`` also hold only inside
    Q, so the segments of successive levels nest.
    """
    sig = _sig(inner.sentence)
    if Q in sig.symbols() or g in sig.symbols():
        raise SymbolClash(f"{Q} or {g} already used by {inner.name}")
    b = _Builder(inner.sentence.signature)
    b.add_symbols(functions=[(g, 2)], relations=[(Q, 1)])

    def inQ(t):
        return Rel(Q, (t,))

    b.add("(1) < is a linear order", _linear_order())
    b.text(f"(2) {Q} is an initial segment", f"({Q}(x) & !{Q}(y)) -> x < y", ("x", "y"))
    _closed_under(b, "(3)-(4)", sig, inQ)
    _trivial_outside(b, "(5)-(6)", sig, inQ)
    if confine_relations:
        _relations_inside(b, "(5')", sig, inQ)
    for c in relativize_clauses(inner.sentence, inQ):
        b.add(f"(7) {Q} is a model of {inner.name}", c)
    _injection(b, "(8)-(10)", g, lambda t: Not(inQ(t)), inQ)
    return CombinatorResult(b.sentence(), inner.n + 1, (label,) + inner.provenance)


def build_phi1(phi0: CombinatorResult) -> CombinatorResult:
    if phi0.sentence.signature != PHI0_SIGNATURE:
        raise FixtureError("phi0 must have the signature {<, P/1, f/2, p1/1, p2/1}")
    return _wrap_level(phi0, "Q", "g", "phi1")


def build_phi_n(phi0: CombinatorResult, n: int) -> CombinatorResult:
    if n < 0:
        raise ValueError("n must be >= 0")
    cur = phi0
    if n >= 1:
        cur = build_phi1(phi0)
    for k in range(2, n + 1):
        cur = _wrap_level(cur, f"Q_{k}", f"g_{k}", f"phi{k}", confine_relations=True)
    return cur


# -- Phi (tree encoding) --------------------------------------------------------


PHI_SIGNATURE_SYMBOLS = frozenset(
    ["<", "P0", "P1", "P2", "P3", "Q", "p1", "p2", "f", "g", "prec", "p", "I", "i", "j", "h", "k", "l"]
)


def build_Phi(phi0: CombinatorResult) -> CombinatorResult:
    """Conjunction of seven parts describing a tree on P2 with branches on P3 (``prec`` is the tree order)."""
    phi1 = build_phi1(phi0)
    sig1 = _sig(phi1.sentence)
    b = _Builder(sig1)
    b.add_symbols(
        functions=[("p", 2), ("I", 1), ("i", 1), ("j", 1), ("h", 2), ("k", 2), ("l", 2)],
        relations=[("P0", 1), ("P1", 1), ("P2", 1), ("P3", 1), ("prec", 2)],
    )
    T = b.text
    # Phi_1: four successive segments
    b.add("Phi1 (1) < is a linear order", _linear_order())
    for i in range(4):
        for j in range(i + 1, 4):
            T(f"Phi1 (2) P{i} before P{j}", f"(P{i}(x) & P{j}(y)) -> x < y", ("x", "y"))
    # Phi_2: phi1 lives on P0 u P1 with Q = P0
    low = "(P0({0}) | P1({0}))"
    T("Phi2 (1)", "Q(x) <-> P0(x)", ("x",))
    T("Phi2 (2)", f"({low.format('x')} & {low.format('y')}) -> {low.format('f(x,y)')}", ("x", "y"))
    T("Phi2 (3)", f"({low.format('x')} & {low.format('y')}) -> {low.format('g(x,y)')}", ("x", "y"))
    for pi in ("p1", "p2"):
        T(f"Phi2 (4) {pi}", f"{low.format('x')} -> {low.format(pi + '(x)')}", ("x",))
    T("Phi2 (5)", f"(!{low.format('x')} | !{low.format('y')}) -> f(x,y) = x", ("x", "y"))
    T("Phi2 (6)", f"(!{low.format('x')} | !{low.format('y')}) -> g(x,y) = x", ("x", "y"))
    for pi in ("p1", "p2"):
        T(f"Phi2 (7) {pi}", f"!{low.format('x')} -> {pi}(x) = x", ("x",))
    for c in relativize_clauses(phi1.sentence, lambda t: disj(Rel("P0", (t,)), Rel("P1", (t,)))):
        b.add("Phi2 (8) P0 u P1 is a model of phi1", c)
    # Phi_3: prec is a tree order on P2 refining <
    T("Phi3 (1)", "prec(x,y) -> (P2(x) & P2(y))", ("x", "y"))
    T("Phi3 (2)", "(((prec(x,y) | x = y) & (prec(y,x) | y = x)) <-> x = y) & ((prec(x,y) & prec(y,z)) -> prec(x,z))")
    T("Phi3 (3)", "prec(x,y) -> x < y", ("x", "y"))
    # Phi_4: I cuts P2 into levels, p(I(x), y) is the predecessor of y on the level of x
    T("Phi4 (1)", "(P2(x) & P2(y)) -> (I(y) <= y & (y <= x -> I(y) <= I(x)) & ((I(y) <= x & x <= y) -> I(x) = I(y)))",
      ("x", "y"))
    T("Phi4 (2)", "(P2(x) & P2(y)) -> (prec(x,y) -> I(x) < I(y))", ("x", "y"))
    T("Phi4 (3)", "(P2(x) & P2(y) & P2(z)) -> ((prec(x,y) & prec(z,y) & I(x) = I(z)) -> x = z)")
    T("Phi4 (4)", "(P2(x) & P2(y)) -> (I(x) < I(y) -> (I(p(I(x),y)) = I(x) & prec(p(I(x),y),y)))", ("x", "y"))
    T("Phi4 (5)", "(!P2(x) | !P2(y) | I(x) != x | I(y) <= I(x)) -> p(x,y) = x", ("x", "y"))
    T("Phi4 (6)", "!P2(x) -> I(x) = x", ("x",))
    # Phi_5: levels inject into P0, P2 embeds increasingly into P1
    T("Phi5 (1)", "P2(x) -> P0(i(x))", ("x",))
    T("Phi5 (2)", "(P2(x) & P2(y) & I(x) = I(y) & x != y) -> i(x) != i(y)", ("x", "y"))
    T("Phi5 (3)", "P2(x) -> P1(j(x))", ("x",))
    T("Phi5 (4)", "(P2(x) & P2(y) & x < y) -> j(x) < j(y)", ("x", "y"))
    T("Phi5 (5)", "!P2(x) -> i(x) = x", ("x",))
    T("Phi5 (6)", "!P2(x) -> j(x) = x", ("x",))
    # Phi_6: each element of P3 names a branch, distinct ones split somewhere
    T("Phi6 (1)", "(P2(x) & P3(y)) -> (P2(h(I(x),y)) & I(h(I(x),y)) = I(x))", ("x", "y"))
    T("Phi6 (2)", "(P2(x) & P2(y) & P3(z) & I(x) < I(y)) -> prec(h(I(x),z),h(I(y),z))")
    T("Phi6 (3)", "(!P2(x) | !P3(y) | x != I(x)) -> h(x,y) = x", ("x", "y"))
    T("Phi6 (4)", "(P3(x) & P3(y) & x != y) -> (I(k(x,y)) = k(x,y) & P2(k(x,y)))", ("x", "y"))
    T("Phi6 (5)", "(P3(x) & P3(y) & x != y) -> h(k(x,y),x) != h(k(x,y),y)", ("x", "y"))
    T("Phi6 (6)", "(!P3(x) | !P3(y) | x = y) -> k(x,y) = x", ("x", "y"))
    # Phi_7: initial segments of P3 inject into P2
    T("Phi7 (1)", "(P3(x) & P3(y) & y < x) -> P2(l(x,y))", ("x", "y"))
    T("Phi7 (2)", "(P3(x) & P3(y) & P3(z) & y < z & z < x) -> l(x,y) != l(x,z)")
    T("Phi7 (3)", "(!P3(x) | !P3(y) | !(y < x)) -> l(x,y) = x", ("x", "y"))
    s = b.sentence()
    s = Sentence(s.occurring_signature(), s.q, s.matrix, s.var_names)
    return CombinatorResult(s, 7, ("Phi",) + phi1.provenance)


# -- S_n, psi'_n, T_n -------------------------------------------------------------


def build_Sn(phi: CombinatorResult, n: int, phi0: CombinatorResult) -> CombinatorResult:
    """Three segments: phi_n on R1, phi on R2, and R3 whose initial segments inject into R2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    phin = build_phi_n(phi0, n)
    sig_phi, sig_n = _sig(phi.sentence), _sig(phin.sentence)
    _check_disjoint(sig_phi, sig_n, f"S_{n} needs S(phi) and S(phi_{n}) to share only <")
    taken = sig_phi.symbols() | sig_n.symbols()
    s_, t_ = _fresh("s", taken), _fresh("t", taken)
    R1, R2, R3 = (_fresh(f"R{i}", taken) for i in (1, 2, 3))
    b = _Builder(phin.sentence.signature, sig_phi)
    b.add_symbols(functions=[(s_, 1), (t_, 2)], relations=[(R1, 1), (R2, 1), (R3, 1)])

    def region(R):
        return lambda t: Rel(R, (t,))

    b.add("linear order", _linear_order())
    b.text("R1, R2, R3 cover the model", f"{R1}(x) | {R2}(x) | {R3}(x)", ("x",))
    for A, B in ((R1, R2), (R1, R3), (R2, R3)):
        b.text(f"{A} before {B}", f"({A}(x) & {B}(y)) -> x < y", ("x", "y"))
    # restriction of R1 to S(phi_n) is a model of phi_n; its functions are x1 off R1
    _closed_under(b, "R1", sig_n, region(R1))
    _trivial_outside(b, "R1", sig_n, region(R1))
    for c in relativize_clauses(phin.sentence, region(R1)):
        b.add(f"R1 is a model of {phin.name}", c)
    # restriction of R2 to S(phi) is a model of phi; functions trivial off R2
    _closed_under(b, "R2", sig_phi, region(R2))
    _trivial_outside(b, "R2", sig_phi, region(R2))
    _relations_inside(b, "R2", sig_phi, region(R2))
    for c in relativize_clauses(phi.sentence, region(R2)):
        b.add("R2 is a model of phi", c)
    # s is strictly increasing from R2 into R1 and the identity elsewhere
    b.text("s maps R2 into R1", f"{R2}(x) -> {R1}({s_}(x))", ("x",))
    b.text("s strictly increasing on R2", f"({R2}(x) & {R2}(y) & x < y) -> {s_}(x) < {s_}(y)", ("x", "y"))
    b.text("s trivial off R2", f"!{R2}(x) -> {s_}(x) = x", ("x",))
    # t injects initial segments of R3 into R2
    _injection(b, "t", t_, region(R3), region(R2))
    return CombinatorResult(b.sentence(), phi.n + phin.n + 2,
                            (f"S_{n}({phi.name})",) + phi.provenance[1:] + phin.provenance)


def build_psi_prime_n(psi: CombinatorResult, n: int, phi0: CombinatorResult) -> CombinatorResult:
    """phi_{n-1} on an initial segment R, psi on the rest, initial segments of the rest injected into R."""
    if n < 1:
        raise ValueError("n must be >= 1")
    base = build_phi_n(phi0, n - 1)
    sig_psi, sig_b = _sig(psi.sentence), _sig(base.sentence)
    _check_disjoint(sig_psi, sig_b, f"psi'_{n} needs S(psi) and S(phi_{n - 1}) to share only <")
    taken = sig_psi.symbols() | sig_b.symbols()
    R, t_ = _fresh("R", taken), _fresh("t", taken)
    b = _Builder(base.sentence.signature, sig_psi)
    b.add_symbols(functions=[(t_, 2)], relations=[(R, 1)])

    def inR(t):
        return Rel(R, (t,))

    def outR(t):
        return Not(Rel(R, (t,)))

    b.add("linear order", _linear_order())
    b.text("R is an initial segment", f"({R}(x) & !{R}(y)) -> x < y", ("x", "y"))
    _closed_under(b, "R", sig_b, inR)
    _trivial_outside(b, "R", sig_b, inR)
    for c in relativize_clauses(base.sentence, inR):
        b.add(f"R is a model of {base.name}", c)
    _closed_under(b, "not R", sig_psi, outR)
    _trivial_outside(b, "not R", sig_psi, outR)
    _relations_inside(b, "not R", sig_psi, outR)
    for c in relativize_clauses(psi.sentence, outR):
        b.add("not R is a model of psi", c)
    _injection(b, "t", t_, outR, inR)
    return CombinatorResult(b.sentence(), psi.n + 1 + base.n,
                            (f"psi'_{n}({psi.name})",) + psi.provenance[1:] + base.provenance)


def build_Tn(psi: CombinatorResult, n: int, theta: CombinatorResult, phi0: CombinatorResult) -> CombinatorResult:
    pp = build_psi_prime_n(psi, n, phi0)
    out = star_psi(theta, pp)
    return CombinatorResult(out.sentence, out.n,
                            (f"T_{n}({psi.name})", f"stage 2: star_psi({theta.name}, {pp.name})",
                             f"stage 1: {pp.name}") + pp.provenance[1:])


# -- fixtures -----------------------------------------------------------------------


SHIPPED_FIXTURES = ("a_then_bs", "ab_pairs", "beta", "example2", "exactly_two", "phi0", "singleton", "theta")

_STEPS = re.compile(r"^#\s*steps:\s*(\d+)\s*$", re.M)


def read_steps(text: str) -> int | None:
    """The closure bound declared by a ``# steps: N`` comment line, if any."""
    m = _STEPS.search(text)
    return int(m.group(1)) if m else None


def fixture_names() -> list[str]:
    return list(SHIPPED_FIXTURES) + ["Phi", "phi1", "theta_star_beta"]


def load_fixture(name: str) -> CombinatorResult:
    """A shipped sentence file, or one of the derived fixtures (phi1, phi<k>, Phi, theta_star_beta)."""
    if name in SHIPPED_FIXTURES:
        text = resources.files("localsent").joinpath("fixtures", f"{name}.sent").read_text()
        return CombinatorResult(parse_sentence(text), read_steps(text), (name,))
    if name == "phi1":
        return build_phi1(load_fixture("phi0"))
    if name.startswith("phi") and name[3:].isdigit():
        return build_phi_n(load_fixture("phi0"), int(name[3:]))
    if name == "Phi":
        return build_Phi(load_fixture("phi0"))
    if name == "theta_star_beta":
        return star_psi(load_fixture("theta"), load_fixture("beta"))
    raise FixtureError(f"unknown fixture {name!r}")
