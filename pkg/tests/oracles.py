"""Brute-force reference implementations used to check the library.

Nothing here imports the evaluation or closure code under test; terms are
plain nested tuples so the oracles stay independent of the library's AST
walkers.
"""

from __future__ import annotations

import itertools

from localsent.logic import (
    And, App, Bottom, Const, Eq, Iff, Implies, Lt, Not, Or, Rel, Top, Var,
)


# -- evaluation -----------------------------------------------------------------


def naive_term(M, t, env):
    kind = type(t).__name__
    if kind == "Var":
        return env[t.index]
    if kind == "Const":
        return M.constants[t.name]
    vals = [naive_term(M, a, env) for a in t.args]
    return dict(M.functions[t.fn])[tuple(vals)]


def naive_formula(M, f, env):
    kind = type(f).__name__
    if kind == "Top":
        return True
    if kind == "Bottom":
        return False
    if kind == "Eq":
        return naive_term(M, f.left, env) == naive_term(M, f.right, env)
    if kind == "Lt":
        return naive_term(M, f.left, env) < naive_term(M, f.right, env)
    if kind == "Rel":
        return tuple(naive_term(M, a, env) for a in f.args) in set(M.relations[f.name])
    if kind == "Not":
        return not naive_formula(M, f.arg, env)
    if kind == "And":
        result = True
        for a in f.args:
            result = result and naive_formula(M, a, env)
        return result
    if kind == "Or":
        result = False
        for a in f.args:
            result = result or naive_formula(M, a, env)
        return result
    if kind == "Implies":
        return (not naive_formula(M, f.left, env)) or naive_formula(M, f.right, env)
    if kind == "Iff":
        return naive_formula(M, f.left, env) == naive_formula(M, f.right, env)
    raise TypeError(kind)


def naive_satisfies(M, s) -> bool:
    return all(naive_formula(M, s.matrix, env) for env in itertools.product(range(M.size), repeat=s.q))


# -- closure --------------------------------------------------------------------


def _closed(M, S) -> bool:
    for name, table in M.functions.items():
        for args, v in table.items():
            if all(a in S for a in args) and v not in S:
                return False
    return all(c in S for c in M.constants.values())


def naive_closure(M, X) -> frozenset:
    """Smallest subset containing X and the constants that is closed under every function."""
    best = None
    for r in range(M.size + 1):
        for S in itertools.combinations(range(M.size), r):
            S = frozenset(S)
            if set(X) <= S and _closed(M, S):
                best = S if best is None else best & S
    return best


def naive_layers(M, X) -> list[frozenset]:
    """cl^1, cl^2, ... computed from the definition until two consecutive layers agree."""
    def step(S):
        out = set(S) | set(M.constants.values())
        for name, table in M.functions.items():
            for args, v in table.items():
                if all(a in S for a in args):
                    out.add(v)
        return frozenset(out)

    layers = [step(frozenset(X))]
    while True:
        layers.append(step(layers[-1]))
        if layers[-1] == layers[-2]:
            return layers


# -- plain indiscernibility ----------------------------------------------------


def naive_terms(sig, k: int, depth: int) -> list:
    """All terms over variables 0..k-1 and the constants with application depth <= depth."""
    terms = [("var", i) for i in range(k)] + [("const", c) for c in sig.constants]
    for _ in range(depth):
        new = list(terms)
        for name, ar in sig.functions:
            for args in itertools.product(terms, repeat=ar):
                t = ("app", name, args)
                if t not in new:
                    new.append(t)
        terms = new
    return terms


def _value(M, t, env):
    if t[0] == "var":
        return env[t[1]]
    if t[0] == "const":
        return M.constants[t[1]]
    return M.functions[t[1]][tuple(_value(M, a, env) for a in t[2])]


def naive_atom_type(M, terms, env) -> tuple:
    """Truth values of every atom built from ``terms`` under ``env``."""
    vals = [_value(M, t, env) for t in terms]
    out = []
    for a, b in itertools.product(vals, repeat=2):
        out += [a == b, a < b]
    for name, ar in M.signature.relations:
        for args in itertools.product(vals, repeat=ar):
            out.append(args in M.relations[name])
    return tuple(out)


def naive_plain(M, X, depth: int, max_len: int | None = None) -> bool:
    """Every two increasing tuples of the same length from X satisfy the same atoms."""
    max_len = len(X) if max_len is None else max_len
    for k in range(1, max_len + 1):
        terms = naive_terms(M.signature, k, depth)
        types = {naive_atom_type(M, terms, env) for env in itertools.combinations(X, k)}
        if len(types) > 1:
            return False
    return True


# -- models ---------------------------------------------------------------------


def all_structures(sig, size):
    """Every structure over ``sig`` with domain 0..size-1."""
    from localsent.structures import FiniteStructure

    fn_cells = [(name, args) for name, ar in sig.functions for args in itertools.product(range(size), repeat=ar)]
    rel_cells = [(name, args) for name, ar in sig.relations for args in itertools.product(range(size), repeat=ar)]
    for fvals in itertools.product(range(size), repeat=len(fn_cells)):
        fns = {name: {} for name, _ in sig.functions}
        for (name, args), v in zip(fn_cells, fvals):
            fns[name][args] = v
        for rvals in itertools.product((False, True), repeat=len(rel_cells)):
            rels = {name: set() for name, _ in sig.relations}
            for (name, args), v in zip(rel_cells, rvals):
                if v:
                    rels[name].add(args)
            for cvals in itertools.product(range(size), repeat=len(sig.constants)):
                yield FiniteStructure(sig, size, fns, rels, dict(zip(sig.constants, cvals)))


def brute_spectrum(s, ceiling: int) -> set[int]:
    return {k for k in range(1, ceiling + 1) if any(naive_satisfies(M, s) for M in all_structures(s.signature, k))}


def sums_spectrum(phi_sizes: set[int], psi_sizes: set[int], ceiling: int) -> set[int]:
    """Sizes sum_{i<nu} a_i with nu in psi_sizes and every a_i in phi_sizes, capped at ceiling."""
    reachable = {0: {0}}  # number of summands -> achievable totals
    for count in range(1, ceiling + 1):
        reachable[count] = {t + a for t in reachable[count - 1] for a in phi_sizes if t + a <= ceiling}
    return {t for nu in psi_sizes if nu in reachable for t in reachable[nu] if 1 <= t <= ceiling}


__all__ = [
    "naive_term", "naive_formula", "naive_satisfies", "naive_closure", "naive_layers", "naive_terms",
    "naive_atom_type", "naive_plain", "all_structures", "brute_spectrum", "sums_spectrum",
    "And", "App", "Bottom", "Const", "Eq", "Iff", "Implies", "Lt", "Not", "Or", "Rel", "Top", "Var",
]
