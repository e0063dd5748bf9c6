"""Stretching a model generated by special indiscernibles along a linear order.

For a unary signature, a model generated by special indiscernibles
``g_1 < ... < g_N`` (N >= 3) splits into a prefix ``K`` of elements that every
generator reaches (constants and terms constant on the generators) followed by
one block per generator: the values of the non-constant terms at that
generator.  Indiscernibility makes the blocks consecutive intervals with the
same internal shape, so the model along any order ``Y`` is ``K`` followed by
``|Y|`` copies of the block.  The template records that shape and is checked
against every block of the witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .finder import (
    SPECIAL, DecisionReport, IndiscernibleWitness, LocalCertificate, check_special_indiscernibles, decide,
    require_unary,
)
from .search import DEFAULT_BUDGET
from .logic import Signature
from .structures import FiniteStructure


class TemplateError(ValueError):
    """The witness cannot be read as a stretching template."""


@dataclass(frozen=True)
class OrderSpec:
    """A finite order of ``size`` points, or the first ``size`` points of ω when ``omega`` is set."""

    size: int
    omega: bool = False

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("order size must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "OrderSpec":
        text = text.strip()
        if text.startswith("omega-prefix(") and text.endswith(")"):
            return cls(int(text[len("omega-prefix("):-1]), True)
        return cls(int(text))

    def __str__(self):
        return f"omega-prefix({self.size})" if self.omega else str(self.size)


@dataclass(frozen=True)
class OmegaType:
    """Order type ω: a finite prefix followed by blocks of fixed size repeated ω times."""

    prefix: int
    block: int

    def __str__(self):
        return f"omega (prefix {self.prefix}, block {self.block})"


@dataclass(frozen=True)
class StretchTemplate:
    """Shape of a stretchable model.

    Elements are ``("K", i)`` for the constant prefix and ``("B", c)`` for the
    class ``c`` of a block.  ``fn[f][elem]`` is the image of an element of a
    block (or of K).  Binary relation tuples between two blocks are stored per
    direction: ``lower_upper`` when the first argument sits in the earlier
    block, ``upper_lower`` otherwise.
    """

    signature: Signature
    k_size: int
    classes: int
    generator_class: int
    words: tuple[tuple[str, ...], ...]
    constant_words: tuple[tuple[str, ...], ...]
    fn: dict
    constants: dict
    unary: dict
    same: dict
    lower_upper: dict
    upper_lower: dict
    witness: IndiscernibleWitness

    @property
    def block_size(self) -> int:
        return self.classes


def _reach(M: FiniteStructure, starts) -> set[int]:
    seen = set(starts)
    todo = list(starts)
    while todo:
        x = todo.pop()
        for name, _ in M.signature.functions:
            y = M.functions[name][(x,)]
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def _word_paths(M: FiniteStructure, g: int) -> dict[int, tuple[str, ...]]:
    """Shortest (then lexicographically least) word reaching each element from ``g``."""
    names = sorted(n for n, _ in M.signature.functions)
    paths = {g: ()}
    frontier = [g]
    while frontier:
        nxt = []
        for x in frontier:
            for f in names:
                y = M.functions[f][(x,)]
                if y not in paths:
                    paths[y] = paths[x] + (f,)
                    nxt.append(y)
        frontier = nxt
    return paths


def _apply(M: FiniteStructure, word, x: int) -> int:
    for f in word:
        x = M.functions[f][(x,)]
    return x


def build_template(w: IndiscernibleWitness) -> StretchTemplate:
    M = w.model
    sig = M.signature
    require_unary(sig, "stretching")
    if w.kind != SPECIAL:
        raise TemplateError("stretching needs a special witness")
    if any(ar > 2 for _, ar in sig.relations):
        raise TemplateError("stretching supports relations of arity at most 2")
    G = w.generators
    if len(G) < MIN_GENERATORS:
        raise TemplateError(f"stretching needs at least {MIN_GENERATORS} generators")
    if not check_special_indiscernibles(M, G, w.steps):
        raise TemplateError("witness generators are not special indiscernibles")

    reach = [_reach(M, [g]) for g in G]
    const_part = _reach(M, list(M.constants.values()))
    K = set(const_part)
    for a, b in itertools.combinations(reach, 2):
        K |= a & b
    blocks = [sorted(r - K) for r in reach]
    Ks = sorted(K)
    if set(Ks) | set().union(*map(set, blocks)) != set(M.domain):
        raise TemplateError("witness has elements outside the generated blocks")
    if len({len(b) for b in blocks}) != 1:
        raise TemplateError("blocks differ in size")
    flat = Ks + [x for b in blocks for x in b]
    if flat != list(M.domain):
        raise TemplateError("the constant part and the blocks are not consecutive intervals")

    mid = 1  # the second generator has neighbours on both sides
    paths = _word_paths(M, G[mid])
    words = tuple(paths[x] for x in blocks[mid])
    for j, g in enumerate(G):
        if [_apply(M, wd, g) for wd in words] != blocks[j]:
            raise TemplateError(f"block of generator {j} does not match the block shape")
    kpos = {x: i for i, x in enumerate(Ks)}
    cls = {x: c for c, x in enumerate(blocks[mid])}
    kpaths = {}
    for x in Ks:
        p = paths.get(x)
        kpaths[x] = p if p is not None else ()

    def elem(x, block):
        if x in kpos:
            return ("K", kpos[x])
        if x in block:
            return ("B", block.index(x))
        raise TemplateError("a function leaves its block")

    fn = {}
    for f, _ in sig.functions:
        table = {}
        for j, b in enumerate(blocks):
            for c, x in enumerate(b):
                e = elem(M.functions[f][(x,)], b)
                if table.setdefault(("B", c), e) != e:
                    raise TemplateError(f"{f} acts differently on different blocks")
        for x in Ks:
            y = M.functions[f][(x,)]
            if y not in kpos:
                raise TemplateError(f"{f} maps the constant part into a block")
            table[("K", kpos[x])] = ("K", kpos[y])
        fn[f] = table
    constants = {c: kpos[v] for c, v in M.constants.items()}

    unary, same, lower_upper, upper_lower = {}, {}, {}, {}
    for r, ar in sig.relations:
        tuples = M.relations[r]
        if ar == 1:
            vals = [frozenset(c for c, x in enumerate(b) if (x,) in tuples) for b in blocks]
            if len(set(vals)) != 1:
                raise TemplateError(f"{r} differs between blocks")
            unary[r] = (frozenset(kpos[x] for x in Ks if (x,) in tuples), vals[0])
            continue
        same_v, lu_v, ul_v, kk, kb, bk = set(), set(), set(), set(), set(), set()
        for a, b in tuples:
            ka, kb_ = a in kpos, b in kpos
            if ka and kb_:
                kk.add((kpos[a], kpos[b]))
        readings = []
        for i, j in itertools.combinations(range(len(G)), 2):
            bi, bj = blocks[i], blocks[j]
            lu = frozenset((ci, cj) for ci, x in enumerate(bi) for cj, y in enumerate(bj) if (x, y) in tuples)
            ul = frozenset((cj, ci) for ci, x in enumerate(bi) for cj, y in enumerate(bj) if (y, x) in tuples)
            readings.append((lu, ul))
        if len(set(readings)) > 1:
            raise TemplateError(f"{r} between blocks depends on the pair of blocks")
        for j, b in enumerate(blocks):
            s_ = frozenset((ci, cj) for ci, x in enumerate(b) for cj, y in enumerate(b) if (x, y) in tuples)
            kb_j = frozenset((kpos[k], c) for k in Ks for c, x in enumerate(b) if (k, x) in tuples)
            bk_j = frozenset((c, kpos[k]) for k in Ks for c, x in enumerate(b) if (x, k) in tuples)
            if j == 0:
                same_v, kb, bk = s_, kb_j, bk_j
            elif (s_, kb_j, bk_j) != (same_v, kb, bk):
                raise TemplateError(f"{r} differs between blocks")
        same[r] = (frozenset(kk), frozenset(kb), frozenset(bk), frozenset(same_v))
        lower_upper[r], upper_lower[r] = readings[0] if readings else (frozenset(), frozenset())

    return StretchTemplate(
        signature=sig, k_size=len(Ks), classes=len(words), generator_class=cls[G[mid]],
        words=words, constant_words=tuple(kpaths[x] for x in Ks), fn=fn, constants=constants,
        unary=unary, same=same, lower_upper=lower_upper, upper_lower=upper_lower, witness=w,
    )


MIN_GENERATORS = 3


def find_template(cert: LocalCertificate, budget: int = DEFAULT_BUDGET,
                  N: int | None = None) -> tuple[DecisionReport, StretchTemplate | None]:
    """Decide the ω-model question and read a template off the special witness.

    A template needs three generators, so the search uses at least that many
    even when the computed N is smaller; extra generators keep the witness sound.
    """
    N = max(cert.N, MIN_GENERATORS) if N is None else N
    report = decide(cert, "omega-model", budget, N)
    return report, (build_template(report.witness) if report.witness is not None else None)


def _index(tpl: StretchTemplate, block: int, c: int) -> int:
    return tpl.k_size + block * tpl.classes + c


def stretch(tpl: StretchTemplate, Y: OrderSpec) -> FiniteStructure:
    """The model generated by ``Y.size`` indiscernibles shaped like the template.

    For an ω-prefix this is the initial segment of the ω-stretch made of the
    constant part and the first ``Y.size`` blocks, which is closed under all
    functions.
    """
    k = Y.size
    size = tpl.k_size + k * tpl.classes

    def locate(e, block):
        kind, i = e
        return i if kind == "K" else _index(tpl, block, i)

    fns = {}
    for f, table in tpl.fn.items():
        out = {}
        for i in range(tpl.k_size):
            out[(i,)] = locate(table[("K", i)], 0)
        for j in range(k):
            for c in range(tpl.classes):
                out[(_index(tpl, j, c),)] = locate(table[("B", c)], j)
        fns[f] = out
    rels = {}
    for r, ar in tpl.signature.relations:
        if ar == 1:
            kset, cset = tpl.unary[r]
            rels[r] = [(i,) for i in kset] + [(_index(tpl, j, c),) for j in range(k) for c in cset]
            continue
        kk, kb, bk, same = tpl.same[r]
        tuples = list(kk)
        for j in range(k):
            tuples += [(i, _index(tpl, j, c)) for i, c in kb]
            tuples += [(_index(tpl, j, c), i) for c, i in bk]
            tuples += [(_index(tpl, j, a), _index(tpl, j, b)) for a, b in same]
            for j2 in range(j + 1, k):
                tuples += [(_index(tpl, j, a), _index(tpl, j2, b)) for a, b in tpl.lower_upper[r]]
                tuples += [(_index(tpl, j2, a), _index(tpl, j, b)) for a, b in tpl.upper_lower[r]]
        rels[r] = tuples
    return FiniteStructure(tpl.signature, size, fns, rels, dict(tpl.constants))


def stretch_generators(tpl: StretchTemplate, Y: OrderSpec) -> tuple[int, ...]:
    return tuple(_index(tpl, j, tpl.generator_class) for j in range(Y.size))


def embedding(tpl: StretchTemplate, f: Sequence[int], target_size: int) -> tuple[int, ...]:
    """Element map of M(Y) -> M(Z) induced by the increasing map ``f`` from Y into Z = range(target_size)."""
    f = tuple(f)
    if any(a >= b for a, b in zip(f, f[1:])) or any(not 0 <= x < target_size for x in f):
        raise ValueError("f must be strictly increasing into the target order")
    out = list(range(tpl.k_size))
    for j, fj in enumerate(f):
        out += [_index(tpl, fj, c) for c in range(tpl.classes)]
    return tuple(out)


def order_type_of_stretch(tpl: StretchTemplate, Y: OrderSpec):
    if Y.omega:
        return OmegaType(tpl.k_size, tpl.classes)
    return tpl.k_size + Y.size * tpl.classes


# -- words ------------------------------------------------------------------------


@dataclass(frozen=True)
class WordReport:
    letters: tuple[str, ...]
    u: int
    v: int

    def text(self) -> str:
        sep = "" if all(len(a) == 1 for a in self.letters) else " "
        return sep.join(self.letters)

    def periodicity(self) -> str:
        return f"u={self.u} v={self.v}"


def word_of_model(M: FiniteStructure, alphabet: Sequence[str]) -> tuple[str, ...]:
    """The letter of each element in order; the unary predicates must partition the domain."""
    for a in alphabet:
        if M.signature.relation_arity.get(a) != 1:
            raise ValueError(f"{a!r} is not a unary predicate")
    word = []
    for x in M.domain:
        hits = [a for a in alphabet if (x,) in M.relations[a]]
        if len(hits) != 1:
            raise ValueError(f"element {x} carries {len(hits)} letters; the predicates must partition the domain")
        word.append(hits[0])
    return tuple(word)


def ultimately_periodic(word: Sequence[str]) -> tuple[int, int]:
    """Least (|u|, |v|) with the word equal to a prefix of u v^ω and at least two full periods after u."""
    n = len(word)
    for u in range(n):
        for v in range(1, (n - u) // 2 + 1):
            if all(word[i] == word[i + v] for i in range(u, n - v)):
                return u, v
    return n, 0


def block_periodicity(tpl: StretchTemplate, p: int, alphabet: Sequence[str]) -> tuple[WordReport, bool]:
    """Word of the ω-prefix with p blocks, reported as u = constant part, v = block.

    Also returns whether blocks 2..p are pairwise equal as words.
    """
    M = stretch(tpl, OrderSpec(p, True))
    word = word_of_model(M, alphabet)
    blocks = [word[_index(tpl, j, 0):_index(tpl, j, 0) + tpl.classes] for j in range(p)]
    equal = len(set(blocks[1:])) <= 1
    return WordReport(word, tpl.k_size, tpl.classes), equal


def letter_predicates(sig: Signature) -> list[str]:
    return [r for r, ar in sig.relations if ar == 1]


CONSTANT_ON_TAIL = "constant-on-tail"
INTERLEAVED = "interleaved"


def classify_terms(tpl: StretchTemplate, depth: int | None = None) -> dict[tuple[str, ...], str]:
    """Kind of every word of length <= depth (default: the witness's closure steps) on the generators."""
    M, G = tpl.witness.model, tpl.witness.generators
    depth = tpl.witness.steps if depth is None else depth
    names = sorted(n for n, _ in tpl.signature.functions)
    out = {}
    for k in range(depth + 1):
        for word in itertools.product(names, repeat=k):
            vals = {_apply(M, word[::-1], g) for g in G}
            out[word] = CONSTANT_ON_TAIL if len(vals) == 1 else INTERLEAVED
    return out
