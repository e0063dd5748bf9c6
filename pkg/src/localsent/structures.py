"""Finite ordered structures, evaluation, closure and generated substructures.

Domains are ``0..k-1`` and ``<`` is always their natural order, so a
non-linear order cannot even be represented.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from .logic import (
    And, App, Bottom, Const, Eq, Formula, Iff, Implies, Lt, Not, Or, Rel, Sentence,
    Signature, Term, Top, Var,
)


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteStructure:
    signature: Signature
    size: int
    functions: Mapping[str, Mapping[tuple, int]]
    relations: Mapping[str, frozenset]
    constants: Mapping[str, int]

    def __post_init__(self):
        if self.size < 1:
            raise StructureError("domains are non-empty")
        fns = {}
        for name, ar in self.signature.functions:
            table = dict(self.functions.get(name, {}))
            for args in itertools.product(range(self.size), repeat=ar):
                v = table.get(args)
                if v is None or not 0 <= v < self.size:
                    raise StructureError(f"function {name} is not total on {args}")
            fns[name] = MappingProxyType(table)
        rels = {}
        for name, ar in self.signature.relations:
            tuples = frozenset(tuple(t) for t in self.relations.get(name, ()))
            for t in tuples:
                if len(t) != ar or not all(0 <= x < self.size for x in t):
                    raise StructureError(f"relation {name} has a bad tuple {t}")
            rels[name] = tuples
        consts = {}
        for c in self.signature.constants:
            v = self.constants.get(c)
            if v is None or not 0 <= v < self.size:
                raise StructureError(f"constant {c} has no value in the domain")
            consts[c] = v
        object.__setattr__(self, "functions", MappingProxyType(fns))
        object.__setattr__(self, "relations", MappingProxyType(rels))
        object.__setattr__(self, "constants", MappingProxyType(consts))

    def __reduce__(self):
        # mapping proxies do not pickle; rebuild from plain dicts in worker processes
        return (FiniteStructure, (
            self.signature, self.size,
            {n: dict(t) for n, t in self.functions.items()},
            {n: set(r) for n, r in self.relations.items()},
            dict(self.constants),
        ))

    @property
    def domain(self) -> range:
        return range(self.size)

    def apply(self, fn: str, args: tuple) -> int:
        return self.functions[fn][tuple(args)]

    def holds(self, rel: str, args: tuple) -> bool:
        return tuple(args) in self.relations[rel]

    def key(self):
        return (
            self.size,
            tuple((n, tuple(sorted(t.items()))) for n, t in sorted(self.functions.items())),
            tuple((n, tuple(sorted(r))) for n, r in sorted(self.relations.items())),
            tuple(sorted(self.constants.items())),
        )

    def __eq__(self, other):
        return isinstance(other, FiniteStructure) and self.signature == other.signature and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def make_structure(signature: Signature, size: int, functions=None, relations=None, constants=None,
                   default=None) -> FiniteStructure:
    """Convenience constructor.  ``functions`` may map names to dicts or callables.

    Missing function entries fall back to ``default(name, args)`` when given.
    """
    tables = {}
    for name, ar in signature.functions:
        given = (functions or {}).get(name, {})
        table = {}
        for args in itertools.product(range(size), repeat=ar):
            if callable(given):
                table[args] = given(*args)
            elif args in given:
                table[args] = given[args]
            elif ar == 1 and args[0] in given:
                table[args] = given[args[0]]
            elif default is not None:
                table[args] = default(name, args)
        tables[name] = table
    rels = {}
    for name, ar in signature.relations:
        raw = (relations or {}).get(name, ())
        rels[name] = frozenset(t if isinstance(t, tuple) else (t,) for t in raw)
    return FiniteStructure(signature, size, tables, rels, dict(constants or {}))


# -- evaluation -------------------------------------------------------------


def eval_term(M: FiniteStructure, t: Term, env) -> int:
    if isinstance(t, Var):
        return env[t.index]
    if isinstance(t, Const):
        return M.constants[t.name]
    return M.functions[t.fn][tuple(eval_term(M, a, env) for a in t.args)]


def eval_formula(M: FiniteStructure, f: Formula, env) -> bool:
    if isinstance(f, Eq):
        return eval_term(M, f.left, env) == eval_term(M, f.right, env)
    if isinstance(f, Lt):
        return eval_term(M, f.left, env) < eval_term(M, f.right, env)
    if isinstance(f, Rel):
        return tuple(eval_term(M, a, env) for a in f.args) in M.relations[f.name]
    if isinstance(f, Not):
        return not eval_formula(M, f.arg, env)
    if isinstance(f, And):
        return all(eval_formula(M, a, env) for a in f.args)
    if isinstance(f, Or):
        return any(eval_formula(M, a, env) for a in f.args)
    if isinstance(f, Implies):
        return (not eval_formula(M, f.left, env)) or eval_formula(M, f.right, env)
    if isinstance(f, Iff):
        return eval_formula(M, f.left, env) == eval_formula(M, f.right, env)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    raise TypeError(f"not a formula: {f!r}")


def _check_signature(M: FiniteStructure, s: Sentence) -> None:
    missing = s.occurring_signature().symbols() - M.signature.symbols()
    if missing:
        raise StructureError(f"structure lacks symbols {sorted(missing)}")
    for name, ar in s.occurring_signature().functions:
        if M.signature.function_arity.get(name) != ar:
            raise StructureError(f"arity mismatch for {name}")
    for name, ar in s.occurring_signature().relations:
        if M.signature.relation_arity.get(name) != ar:
            raise StructureError(f"arity mismatch for {name}")


def counterexample(M: FiniteStructure, s: Sentence):
    """First assignment (lexicographic) falsifying the matrix, or None."""
    _check_signature(M, s)
    for env in itertools.product(range(M.size), repeat=s.q):
        if not eval_formula(M, s.matrix, env):
            return env
    return None


def eval_sentence(M: FiniteStructure, s: Sentence) -> bool:
    return counterexample(M, s) is None


# -- closure ----------------------------------------------------------------


@dataclass(frozen=True)
class ClosureTrace:
    """``layers[i]`` is cl^(i+1)(X, M); the last two layers are equal."""

    layers: tuple[frozenset, ...]

    @property
    def closure(self) -> frozenset:
        return self.layers[-1]

    @property
    def step(self) -> int:
        """Least s >= 1 with cl^(s+1) = cl^s."""
        return len(self.layers) - 1

    def cl(self, n: int) -> frozenset:
        if n < 1:
            raise ValueError("closure layers start at 1")
        return self.layers[min(n, len(self.layers)) - 1]


def closure_step(M: FiniteStructure, X: frozenset) -> frozenset:
    out = set(X)
    for name, ar in M.signature.functions:
        table = M.functions[name]
        for args in itertools.product(sorted(X), repeat=ar):
            out.add(table[args])
    out.update(M.constants.values())
    return frozenset(out)


def closure(M: FiniteStructure, X: Iterable[int]) -> ClosureTrace:
    X = frozenset(X)
    if not X <= frozenset(M.domain):
        raise StructureError("X is not a subset of the domain")
    layers = [closure_step(M, X)]
    while True:
        nxt = closure_step(M, layers[-1])
        layers.append(nxt)
        if nxt == layers[-2]:
            return ClosureTrace(tuple(layers))


@dataclass(frozen=True)
class Embedded:
    """A substructure together with the order-preserving map into its parent."""

    structure: FiniteStructure
    index_map: tuple[int, ...] = field()


def restrict(M: FiniteStructure, elements: Iterable[int]) -> Embedded:
    """Restriction of ``M`` to a set closed under all functions and containing all constants."""
    elems = sorted(set(elements))
    pos = {e: i for i, e in enumerate(elems)}
    fns = {}
    for name, ar in M.signature.functions:
        table = {}
        for args in itertools.product(elems, repeat=ar):
            v = M.functions[name][args]
            if v not in pos:
                raise StructureError(f"{elems} is not closed under {name}")
            table[tuple(pos[a] for a in args)] = pos[v]
        fns[name] = table
    rels = {
        name: frozenset(tuple(pos[a] for a in t) for t in tuples if all(a in pos for a in t))
        for name, tuples in M.relations.items()
    }
    consts = {}
    for c, v in M.constants.items():
        if v not in pos:
            raise StructureError(f"constant {c} is outside {elems}")
        consts[c] = pos[v]
    return Embedded(FiniteStructure(M.signature, len(elems), fns, rels, consts), tuple(elems))


def generated_substructure(M: FiniteStructure, X: Iterable[int]) -> Embedded:
    return restrict(M, closure(M, X).closure)


def reduct(M: FiniteStructure, sig: Signature) -> FiniteStructure:
    return FiniteStructure(
        sig, M.size,
        {n: M.functions[n] for n, _ in sig.functions},
        {n: M.relations[n] for n, _ in sig.relations},
        {c: M.constants[c] for c in sig.constants},
    )


# -- dump format ------------------------------------------------------------


def dump_structure(M: FiniteStructure) -> str:
    lines = [f"domain {M.size}"]
    for name in sorted(M.functions):
        for args in sorted(M.functions[name]):
            lines.append(f"fn {name}: ({','.join(map(str, args))}) -> {M.functions[name][args]}")
    for name in sorted(M.relations):
        for t in sorted(M.relations[name]):
            lines.append(f"rel {name}: ({','.join(map(str, t))})")
    for c in sorted(M.constants):
        lines.append(f"const {c} = {M.constants[c]}")
    return "\n".join(lines) + "\n"


_FN = re.compile(r"fn\s+(\w+)\s*:\s*\(([\d,\s]*)\)\s*->\s*(\d+)$")
_REL = re.compile(r"rel\s+(\w+)\s*:\s*\(([\d,\s]*)\)$")
_CONST = re.compile(r"const\s+(\w+)\s*=\s*(\d+)$")


def load_structure(text: str, signature: Signature) -> FiniteStructure:
    """Read the model dump format; lines not belonging to it are ignored."""
    size = None
    fns: dict[str, dict] = {}
    rels: dict[str, set] = {}
    consts = {}

    def ints(s):
        return tuple(int(x) for x in s.split(",") if x.strip())

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("domain "):
            size = int(line.split()[1])
        elif m := _FN.match(line):
            fns.setdefault(m.group(1), {})[ints(m.group(2))] = int(m.group(3))
        elif m := _REL.match(line):
            rels.setdefault(m.group(1), set()).add(ints(m.group(2)))
        elif m := _CONST.match(line):
            consts[m.group(1)] = int(m.group(2))
    if size is None:
        raise StructureError("dump has no 'domain' line")
    return FiniteStructure(signature, size, fns, rels, consts)
