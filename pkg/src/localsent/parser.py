"""Recursive-descent parser for sentence files.

Grammar (``#`` starts a comment)::

    file      := [sig] sentence+
    sig       := 'sig' '{' (decl ';')* '}'
    decl      := 'fn' NAME '/' INT | 'rel' NAME '/' INT | 'const' NAME
    sentence  := ['forall' NAME* '.'] formula [';']
    formula   := imp ['<->' imp]
    imp       := or ['->' imp]
    or        := and ('|' and)*
    and       := unary ('&' unary)*
    unary     := '!' unary | '(' formula ')' | 'true' | 'false' | atom
    atom      := REL '(' terms ')' | term ('=' | '!=' | '<' | '<=') term
    term      := NAME ['(' terms ')']

``t1 <= t2`` is sugar for ``t1 < t2 | t1 = t2`` and ``t1 != t2`` for ``!(t1 = t2)``.
Several sentences in one file are read as their conjunction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .logic import (
    And, App, Bottom, Const, Eq, Iff, Implies, Lt, Not, Or, Rel, Sentence, Signature,
    SignatureError, Top, Var, conj, le,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+) | (?P<comment>\#[^\n]*) |
    (?P<op><->|->|<=|!=|[<=!&|(),.;{}/]) |
    (?P<int>\d+) |
    (?P<name>[A-Za-z_][A-Za-z0-9_]*) |
    (?P<bad>.)
    """,
    re.VERBOSE,
)

KEYWORDS = {"sig", "fn", "rel", "const", "forall", "true", "false"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        col = m.start() - line_start + 1
        tok = m.group()
        if kind == "bad":
            raise ParseError(f"unexpected character {tok!r}", line, col)
        if kind not in ("ws", "comment"):
            out.append(Token(kind, tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = m.start() + tok.rindex("\n") + 1
    end_col = len(text) - line_start + 1
    out.append(Token("eof", "", line, end_col))
    return out


class _Parser:
    def __init__(self, text: str, signature: Signature | None):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = signature or Signature()
        self.vars: dict[str, int] = {}

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "name") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.tok
        if not self.accept(text):
            shown = tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return tok

    def name(self) -> Token:
        tok = self.tok
        if tok.kind != "name" or tok.text in KEYWORDS:
            raise self.error(f"expected a name, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    # grammar
    def signature_block(self) -> None:
        if not self.accept("sig"):
            return
        self.expect("{")
        fns, rels, consts = [], [], []
        while not self.accept("}"):
            kw = self.tok
            if self.accept("fn") or self.accept("rel"):
                n = self.name().text
                self.expect("/")
                if self.tok.kind != "int":
                    raise self.error("expected an arity")
                ar = int(self.tok.text)
                self.i += 1
                (fns if kw.text == "fn" else rels).append((n, ar))
            elif self.accept("const"):
                consts.append(self.name().text)
            else:
                raise self.error(f"expected 'fn', 'rel', 'const' or '}}', found {kw.text!r}")
            self.expect(";")
        try:
            self.sig = Signature(tuple(fns), tuple(rels), tuple(consts))
        except SignatureError as e:
            raise self.error(str(e), kw) from None

    def sentence(self) -> tuple[list[str], object]:
        names: list[str] = []
        if self.accept("forall"):
            while self.tok.kind == "name" and self.tok.text not in KEYWORDS:
                tok = self.name()
                if self.sig.kind(tok.text) is not None:
                    raise self.error(f"variable {tok.text!r} clashes with a signature symbol", tok)
                if tok.text in names:
                    raise self.error(f"variable {tok.text!r} bound twice", tok)
                names.append(tok.text)
            self.expect(".")
        self.vars = {n: i for i, n in enumerate(names)}
        f = self.formula()
        self.accept(";")
        return names, f

    def formula(self):
        left = self.imp()
        if self.accept("<->"):
            return Iff(left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.accept("->"):
            return Implies(left, self.imp())
        return left

    def disj(self):
        parts = [self.conj()]
        while self.accept("|"):
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self):
        parts = [self.unary()]
        while self.accept("&"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        if self.accept("!"):
            return Not(self.unary())
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.accept("true"):
            return Top()
        if self.accept("false"):
            return Bottom()
        return self.atom()

    def atom(self):
        tok = self.tok
        if tok.kind == "name" and self.sig.kind(tok.text) == "rel":
            self.i += 1
            args = self.arglist(tok)
            ar = self.sig.relation_arity[tok.text]
            if len(args) != ar:
                raise self.error(f"relation {tok.text!r} has arity {ar}, got {len(args)} arguments", tok)
            return Rel(tok.text, tuple(args))
        left = self.term()
        op = self.tok
        if self.accept("="):
            return Eq(left, self.term())
        if self.accept("!="):
            return Not(Eq(left, self.term()))
        if self.accept("<"):
            return Lt(left, self.term())
        if self.accept("<="):
            return le(left, self.term())
        raise self.error(f"expected a comparison after term, found {op.text or 'end of input'!r}", op)

    def arglist(self, head: Token) -> list:
        self.expect("(")
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        if not self.accept(")"):
            raise self.error(f"unclosed '(' opened after {head.text!r} at {head.line}:{head.col}")
        return args

    def term(self):
        tok = self.name()
        n = tok.text
        if n in self.vars:
            return Var(self.vars[n])
        kind = self.sig.kind(n)
        if kind == "const":
            return Const(n)
        if kind == "fn":
            args = self.arglist(tok)
            ar = self.sig.function_arity[n]
            if len(args) != ar:
                raise self.error(f"function {n!r} has arity {ar}, got {len(args)} arguments", tok)
            return App(n, tuple(args))
        if kind == "rel":
            raise self.error(f"relation {n!r} used as a term", tok)
        raise self.error(f"unknown symbol {n!r}", tok)


def parse_sentence(text: str, signature: Signature | None = None) -> Sentence:
    """Parse a sentence file.  A ``sig`` block in ``text`` overrides ``signature``."""
    p = _Parser(text, signature)
    p.signature_block()
    parts = []
    while p.tok.kind != "eof":
        parts.append(p.sentence())
    if not parts:
        raise p.error("expected a sentence")
    if len(parts) == 1:
        names, f = parts[0]
        return Sentence(p.sig, len(names), f, tuple(names))
    q = max(len(n) for n, _ in parts)
    widest = next(n for n, _ in parts if len(n) == q)
    return Sentence(p.sig, q, conj(*(f for _, f in parts)), tuple(widest))


def parse_formula(text: str, signature: Signature, var_names) -> object:
    """Parse a bare quantifier-free formula over the named variables."""
    p = _Parser(text, signature)
    p.vars = {n: i for i, n in enumerate(var_names)}
    f = p.formula()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return f
