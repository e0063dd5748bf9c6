"""Signatures, terms, quantifier-free formulas and universal sentences.

Every signature implicitly carries the binary order ``<`` and equality ``=``;
neither can be declared by the user.  A :class:`Sentence` is a prenex universal
sentence ``forall x1 ... xq . matrix`` whose matrix is quantifier free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    functions: tuple[tuple[str, int], ...] = ()
    relations: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        names = [n for n, _ in self.functions] + [n for n, _ in self.relations] + list(self.constants)
        seen = set()
        for n in names:
            if n in seen:
                raise SignatureError(f"symbol {n!r} declared twice")
            if n in ("<", "="):
                raise SignatureError(f"{n!r} is reserved")
            seen.add(n)
        for n, a in self.functions + self.relations:
            if a < 1:
                raise SignatureError(f"symbol {n!r} must have positive arity, got {a}")

    @property
    def function_arity(self) -> dict[str, int]:
        return dict(self.functions)

    @property
    def relation_arity(self) -> dict[str, int]:
        return dict(self.relations)

    def kind(self, name: str) -> str | None:
        if name in self.function_arity:
            return "fn"
        if name in self.relation_arity:
            return "rel"
        if name in self.constants:
            return "const"
        return None

    def symbols(self) -> frozenset[str]:
        """All non-logical symbols, ``<`` included."""
        return frozenset(
            ["<"] + [n for n, _ in self.functions] + [n for n, _ in self.relations] + list(self.constants)
        )

    def is_unary(self) -> bool:
        return all(a == 1 for _, a in self.functions)

    def max_function_arity(self) -> int:
        return max((a for _, a in self.functions), default=0)

    def union(self, *others: Signature) -> Signature:
        fns = dict(self.functions)
        rels = dict(self.relations)
        consts = list(self.constants)
        for o in others:
            for n, a in o.functions:
                if fns.setdefault(n, a) != a:
                    raise SignatureError(f"function {n!r} used with arities {fns[n]} and {a}")
            for n, a in o.relations:
                if rels.setdefault(n, a) != a:
                    raise SignatureError(f"relation {n!r} used with arities {rels[n]} and {a}")
            consts += [c for c in o.constants if c not in consts]
        return Signature(tuple(fns.items()), tuple(rels.items()), tuple(consts))

    def restrict(self, names: Iterable[str]) -> Signature:
        keep = set(names)
        return Signature(
            tuple(p for p in self.functions if p[0] in keep),
            tuple(p for p in self.relations if p[0] in keep),
            tuple(c for c in self.constants if c in keep),
        )


# -- terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple


Term = Union[Var, Const, App]


def term_complexity(t: Term) -> int:
    """Application depth: 0 for variables and constants."""
    if isinstance(t, App):
        return 1 + max(term_complexity(a) for a in t.args)
    return 0


def closure_depth(t: Term) -> int:
    """Closure step at which the value of ``t`` is guaranteed to appear.

    Constants enter the closure at step 1, so they count as one layer here.
    """
    if isinstance(t, Var):
        return 0
    if isinstance(t, Const):
        return 1
    return 1 + max(closure_depth(a) for a in t.args)


def term_vars(t: Term) -> frozenset[int]:
    if isinstance(t, Var):
        return frozenset([t.index])
    if isinstance(t, App):
        return frozenset().union(*(term_vars(a) for a in t.args))
    return frozenset()


def subst_term(t: Term, mapping) -> Term:
    """Replace variables by ``mapping[index]`` and constants by ``mapping.get(name)``."""
    if isinstance(t, Var):
        return mapping.get(t.index, t)
    if isinstance(t, Const):
        return mapping.get(t.name, t)
    return App(t.fn, tuple(subst_term(a, mapping) for a in t.args))


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Lt:
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Top, Bottom, Eq, Lt, Rel, Not, And, Or, Implies, Iff]
ATOMS = (Eq, Lt, Rel)


def children(f: Formula) -> tuple:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    return ()


def atom_terms(f: Formula) -> tuple:
    if isinstance(f, (Eq, Lt)):
        return (f.left, f.right)
    if isinstance(f, Rel):
        return f.args
    return ()


def iter_atoms(f: Formula) -> Iterator[Formula]:
    if isinstance(f, ATOMS):
        yield f
    for c in children(f):
        yield from iter_atoms(c)


def iter_terms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from iter_terms(a)


def formula_vars(f: Formula) -> frozenset[int]:
    out: set[int] = set()
    for a in iter_atoms(f):
        for t in atom_terms(a):
            out |= term_vars(t)
    return frozenset(out)


def map_formula(f: Formula, on_term) -> Formula:
    """Rebuild ``f`` with every top-level atom term replaced by ``on_term(term)``."""
    if isinstance(f, Eq):
        return Eq(on_term(f.left), on_term(f.right))
    if isinstance(f, Lt):
        return Lt(on_term(f.left), on_term(f.right))
    if isinstance(f, Rel):
        return Rel(f.name, tuple(on_term(t) for t in f.args))
    if isinstance(f, Not):
        return Not(map_formula(f.arg, on_term))
    if isinstance(f, And):
        return And(tuple(map_formula(a, on_term) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(map_formula(a, on_term) for a in f.args))
    if isinstance(f, Implies):
        return Implies(map_formula(f.left, on_term), map_formula(f.right, on_term))
    if isinstance(f, Iff):
        return Iff(map_formula(f.left, on_term), map_formula(f.right, on_term))
    return f


def subst_formula(f: Formula, mapping) -> Formula:
    return map_formula(f, lambda t: subst_term(t, mapping))


def rename_symbols_formula(f: Formula, renaming: dict[str, str]) -> Formula:
    def on_term(t):
        if isinstance(t, Const):
            return Const(renaming.get(t.name, t.name))
        if isinstance(t, App):
            return App(renaming.get(t.fn, t.fn), tuple(on_term(a) for a in t.args))
        return t

    def walk(g):
        if isinstance(g, Rel):
            return Rel(renaming.get(g.name, g.name), tuple(on_term(t) for t in g.args))
        if isinstance(g, ATOMS):
            return map_formula(g, on_term)
        if isinstance(g, Not):
            return Not(walk(g.arg))
        if isinstance(g, And):
            return And(tuple(walk(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(walk(a) for a in g.args))
        if isinstance(g, Implies):
            return Implies(walk(g.left), walk(g.right))
        if isinstance(g, Iff):
            return Iff(walk(g.left), walk(g.right))
        return g

    return walk(f)


def formula_symbols(f: Formula) -> set[str]:
    out: set[str] = set()
    for a in iter_atoms(f):
        if isinstance(a, Rel):
            out.add(a.name)
        if isinstance(a, Lt):
            out.add("<")
        for t in atom_terms(a):
            for s in iter_terms(t):
                if isinstance(s, Const):
                    out.add(s.name)
                elif isinstance(s, App):
                    out.add(s.fn)
    return out


# -- builders ---------------------------------------------------------------


def conj(*fs: Formula) -> Formula:
    parts = [f for f in fs if not isinstance(f, Top)]
    if any(isinstance(f, Bottom) for f in parts):
        return Bottom()
    if not parts:
        return Top()
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def disj(*fs: Formula) -> Formula:
    parts = [f for f in fs if not isinstance(f, Bottom)]
    if any(isinstance(f, Top) for f in parts):
        return Top()
    if not parts:
        return Bottom()
    if len(parts) == 1:
        return parts[0]
    return Or(tuple(parts))


def le(a: Term, b: Term) -> Formula:
    """``a <= b`` desugared exactly as the parser does."""
    return Or((Lt(a, b), Eq(a, b)))


def neq(a: Term, b: Term) -> Formula:
    return Not(Eq(a, b))


def term_min_is(value: Term, args: Sequence[Term]) -> Formula:
    """``value = min(args)`` written with order atoms."""
    return disj(*(conj(Eq(value, a), *(le(a, b) for b in args if b != a)) for a in args))


# -- sentences --------------------------------------------------------------


def default_var_names(q: int, avoid: Iterable[str] = ()) -> tuple[str, ...]:
    avoid = set(avoid)
    prefix = "x"
    while any(f"{prefix}{i + 1}" in avoid for i in range(q)):
        prefix += "v"
    return tuple(f"{prefix}{i + 1}" for i in range(q))


@dataclass(frozen=True)
class Sentence:
    signature: Signature
    q: int
    matrix: Formula
    var_names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        check_formula(self.matrix, self.signature, self.q)
        if len(self.var_names) != self.q:
            object.__setattr__(self, "var_names", default_var_names(self.q, self.signature.symbols()))

    def symbols(self) -> frozenset[str]:
        """Non-logical symbols occurring in the sentence; ``<`` is always included."""
        return frozenset(formula_symbols(self.matrix) | {"<"})

    def occurring_signature(self) -> Signature:
        return self.signature.restrict(self.symbols())

    def clauses(self) -> list[Formula]:
        return flatten_and(self.matrix)

    def __str__(self):
        from .printer import print_sentence

        return print_sentence(self)


def flatten_and(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        out = []
        for a in f.args:
            out.extend(flatten_and(a))
        return out
    if isinstance(f, Top):
        return []
    return [f]


def check_term(t: Term, sig: Signature, q: int) -> None:
    if isinstance(t, Var):
        if not 0 <= t.index < q:
            raise SignatureError(f"variable index {t.index} out of range for q={q}")
    elif isinstance(t, Const):
        if t.name not in sig.constants:
            raise SignatureError(f"unknown constant {t.name!r}")
    elif isinstance(t, App):
        ar = sig.function_arity.get(t.fn)
        if ar is None:
            raise SignatureError(f"unknown function {t.fn!r}")
        if ar != len(t.args):
            raise SignatureError(f"function {t.fn!r} has arity {ar}, applied to {len(t.args)} arguments")
        for a in t.args:
            check_term(a, sig, q)
    else:
        raise TypeError(f"not a term: {t!r}")


def check_formula(f: Formula, sig: Signature, q: int) -> None:
    if isinstance(f, Rel):
        ar = sig.relation_arity.get(f.name)
        if ar is None:
            raise SignatureError(f"unknown relation {f.name!r}")
        if ar != len(f.args):
            raise SignatureError(f"relation {f.name!r} has arity {ar}, applied to {len(f.args)} arguments")
    for t in atom_terms(f):
        check_term(t, sig, q)
    for c in children(f):
        check_formula(c, sig, q)


def conjoin(sentences: Sequence[Sentence], signature: Signature | None = None) -> Sentence:
    """Conjunction of universal sentences sharing the variable block ``x1..xq``."""
    sig = signature or Signature().union(*(s.signature for s in sentences))
    q = max((s.q for s in sentences), default=0)
    return Sentence(sig, q, conj(*(s.matrix for s in sentences)))


def relativize(s: Sentence, guard) -> Formula:
    """Matrix of ``s`` with every quantified variable guarded: ``guard(Var(i))`` for all ``i < q``."""
    if s.q == 0:
        return s.matrix
    return Implies(conj(*(guard(Var(i)) for i in range(s.q))), s.matrix)


# -- syntactic metrics ------------------------------------------------------


@dataclass(frozen=True)
class Metrics:
    n: int
    v: int
    v_prime: int
    q: int
    N: int


@lru_cache(maxsize=None)
def _max_vars(arities: tuple[int, ...], depth: int) -> int:
    """Largest number of distinct variables in a term of complexity <= depth (variables allowed)."""
    if depth == 0 or not arities:
        return 1
    return max(1, max(arities) * _max_vars(arities, depth - 1))


def compute_metrics(s: Sentence, n: int) -> Metrics:
    """v, v', q and N = max{3v, v'+v, q.v'} for closure bound ``n``.

    The maxima are computed by recursion on term depth; that recursion agrees
    with exhaustive enumeration of canonical term shapes (see tests).
    """
    if n < 1:
        raise ValueError("closure bound n must be >= 1")
    sig = s.signature
    arities = tuple(sorted({a for _, a in sig.functions}))
    depth = n + 1
    v = _max_vars(arities, depth) if arities else 0
    per_term = max(1, v)
    rel_arities = [2] + [a for _, a in sig.relations]
    v_prime = max(rel_arities) * per_term
    N = max(3 * v, v_prime + v, s.q * v_prime)
    return Metrics(n=n, v=v, v_prime=v_prime, q=s.q, N=N)


# -- canonical term enumeration ---------------------------------------------


def canonical_terms(sig: Signature, max_complexity: int, *, with_constants: bool = True) -> list[Term]:
    """All terms of complexity <= ``max_complexity`` with variables numbered by first occurrence.

    Variables in each term are 0..k-1 in left-to-right order of first appearance,
    so alpha-variants are enumerated once.
    """
    # shapes: terms whose variable leaves are placeholders; numbering done afterwards
    leaf = Var(-1)
    layers: list[list[Term]] = [[leaf] + ([Const(c) for c in sig.constants] if with_constants else [])]
    all_shapes = list(layers[0])
    for _ in range(max_complexity):
        new = []
        for fn, ar in sig.functions:
            for args in itertools.product(all_shapes, repeat=ar):
                t = App(fn, tuple(args))
                if term_complexity(t) == len(layers):
                    new.append(t)
        layers.append(new)
        all_shapes = all_shapes + new
    out = []
    seen = set()
    for shape in all_shapes:
        for t in _number_leaves(shape):
            if t not in seen:
                seen.add(t)
                out.append(t)
    return out


def _count_leaves(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    if isinstance(t, App):
        return sum(_count_leaves(a) for a in t.args)
    return 0


def _restricted_growth(k: int) -> Iterator[tuple[int, ...]]:
    """Sequences a_0..a_{k-1} with a_0 = 0 and a_i <= 1 + max(a_0..a_{i-1})."""
    if k == 0:
        yield ()
        return

    def rec(prefix, top):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for v in range(top + 2):
            yield from rec(prefix + [v], max(top, v))

    yield from rec([0], 0)


def _number_leaves(shape: Term) -> Iterator[Term]:
    k = _count_leaves(shape)
    for labels in _restricted_growth(k):
        it = iter(labels)

        def fill(t):
            if isinstance(t, Var):
                return Var(next(it))
            if isinstance(t, App):
                return App(t.fn, tuple(fill(a) for a in t.args))
            return t

        yield fill(shape)


def terms_over(sig: Signature, variables: Sequence[int], max_depth: int) -> list[Term]:
    """Terms over exactly the given variable indices (and constants) with closure depth <= max_depth."""
    layer: list[Term] = [Var(i) for i in variables]
    if max_depth >= 1:
        layer += [Const(c) for c in sig.constants]
    known = list(layer)
    seen = set(known)
    for depth in range(1, max_depth + 1):
        new = []
        for fn, ar in sig.functions:
            for args in itertools.product(known, repeat=ar):
                t = App(fn, tuple(args))
                if t not in seen and closure_depth(t) == depth:
                    seen.add(t)
                    new.append(t)
        known += new
    return known


def generate_Cn(sig: Signature, n: int) -> Sentence:
    """Universal sentence stating that closure takes at most ``n`` steps.

    For every canonical term t of closure depth n+1 it requires
    t(x) = t'(x) for some term t' of closure depth <= n over the variables of t.
    Constants enter the closure at its first step, so closure depth (not raw
    application depth) is the measure that matches cl^n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    clauses = []
    q = 0
    if sig.functions:
        for t in canonical_terms(sig, n + 1):
            if closure_depth(t) != n + 1:
                continue
            vs = sorted(term_vars(t))
            alts = [t2 for t2 in terms_over(sig, vs, n) if closure_depth(t2) <= n]
            clauses.append(disj(*(Eq(t, t2) for t2 in alts)))
            q = max(q, len(vs))
    return Sentence(sig, q, conj(*clauses))
