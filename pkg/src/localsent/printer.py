"""Canonical text form of terms, formulas, signatures and sentences."""

from __future__ import annotations

from .logic import (
    And, App, Bottom, Const, Eq, Formula, Iff, Implies, Lt, Not, Or, Rel, Sentence,
    Signature, Term, Top, Var,
)


def print_term(t: Term, names) -> str:
    if isinstance(t, Var):
        return names[t.index]
    if isinstance(t, Const):
        return t.name
    return f"{t.fn}({','.join(print_term(a, names) for a in t.args)})"


def _wrap(f: Formula, names) -> str:
    s = print_formula(f, names)
    if isinstance(f, (And, Or, Implies, Iff)):
        return f"({s})"
    return s


def print_formula(f: Formula, names) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Eq):
        return f"{print_term(f.left, names)} = {print_term(f.right, names)}"
    if isinstance(f, Lt):
        return f"{print_term(f.left, names)} < {print_term(f.right, names)}"
    if isinstance(f, Rel):
        return f"{f.name}({','.join(print_term(a, names) for a in f.args)})"
    if isinstance(f, Not):
        inner = print_formula(f.arg, names)
        if isinstance(f.arg, (Top, Bottom, Rel, Not)):
            return f"!{inner}"
        return f"!({inner})"
    if isinstance(f, And):
        return " & ".join(_wrap(a, names) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_wrap(a, names) for a in f.args)
    if isinstance(f, Implies):
        return f"{_wrap(f.left, names)} -> {_wrap(f.right, names)}"
    if isinstance(f, Iff):
        return f"{_wrap(f.left, names)} <-> {_wrap(f.right, names)}"
    raise TypeError(f"not a formula: {f!r}")


def print_signature(sig: Signature) -> str:
    decls = [f"fn {n}/{a};" for n, a in sig.functions]
    decls += [f"rel {n}/{a};" for n, a in sig.relations]
    decls += [f"const {c};" for c in sig.constants]
    return "sig { " + " ".join(decls) + (" }" if decls else "}")


def print_sentence(s: Sentence, *, with_signature: bool = True) -> str:
    body = print_formula(s.matrix, s.var_names)
    head = f"forall {' '.join(s.var_names)} . " if s.q else ""
    text = head + body
    if with_signature:
        return print_signature(s.signature) + "\n" + text
    return text
