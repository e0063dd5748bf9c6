import itertools

import pytest
from hypothesis import given, settings, strategies as st

from localsent.combinators import load_fixture
from localsent.logic import (
    App, Const, Eq, Signature, SignatureError, Var, canonical_terms, closure_depth, compute_metrics,
    generate_Cn, term_complexity, term_vars,
)
from localsent.parser import parse_sentence
from localsent.printer import print_sentence
from localsent.structures import closure, eval_sentence

from oracles import all_structures, naive_terms
from strategies import structures


def _vars_of(t):
    if t[0] == "var":
        return {t[1]}
    if t[0] == "const":
        return set()
    return set().union(*(_vars_of(a) for a in t[2]))


def oracle_v(sig, n):
    """Most distinct variables in a term of application depth <= n+1, by enumeration."""
    if not sig.functions:
        return 0
    # enough variables that no term is starved of fresh ones
    k = max(1, max(a for _, a in sig.functions)) ** (n + 1)
    return max(len(_vars_of(t)) for t in naive_terms(Signature(sig.functions, (), ()), k, n + 1))


def oracle_v_prime(sig, n):
    v = max(1, oracle_v(sig, n))
    # an atom R(t1..tk) gets its most variables when the terms use disjoint variables
    return max([2] + [a for _, a in sig.relations]) * v


def test_term_complexity_and_closure_depth():
    f = App("g", (Var(0), App("f", (Var(1), Var(2)))))
    assert term_complexity(f) == 2
    assert term_complexity(Var(0)) == 0
    assert closure_depth(Const("a")) == 1
    assert closure_depth(App("i", (Const("a"),))) == 2
    assert term_vars(f) == {0, 1, 2}


def test_signature_rejects_reserved_and_duplicate_names():
    with pytest.raises(SignatureError):
        Signature((("f", 1),), (("f", 1),), ())
    with pytest.raises(SignatureError):
        Signature((), (("<", 2),), ())


def test_example_metrics():
    s = load_fixture("example2").sentence
    m = compute_metrics(s, 2)
    assert (m.v, m.v_prime, m.q, m.N) == (1, 2, 3, 6)


def test_relational_metrics():
    s = parse_sentence("sig { rel R/2; } forall x y . R(x, y) -> R(y, x)")
    m = compute_metrics(s, 1)
    assert (m.v, m.v_prime, m.N) == (0, 2, 4)


def test_binary_function_metrics():
    s = parse_sentence("sig { fn f/2; } forall x . f(x, x) = x")
    assert compute_metrics(s, 1).v == 4


SIGS = [
    Signature((("i", 1),), (("P", 1),), ("a",)),
    Signature((("f", 2),), (), ()),
    Signature((("f", 1), ("g", 2)), (("R", 3),), ()),
    Signature((), (("R", 2),), ("c",)),
]


@pytest.mark.parametrize("sig", SIGS, ids=["unary", "binary", "mixed", "relational"])
@pytest.mark.parametrize("n", [1, 2])
def test_metrics_match_enumeration(sig, n):
    if sig.functions and max(a for _, a in sig.functions) > 1 and n > 1:
        pytest.skip("term enumeration too large")
    s = parse_sentence(print_sentence(_trivial(sig)))
    m = compute_metrics(s, n)
    assert m.v == oracle_v(sig, n)
    assert m.v_prime == oracle_v_prime(sig, n)
    assert m.N == max(3 * m.v, m.v_prime + m.v, m.q * m.v_prime)


def _trivial(sig):
    from localsent.logic import Sentence
    return Sentence(sig, 2, Eq(Var(0), Var(0)))


@pytest.mark.parametrize("sig", SIGS[:2], ids=["unary", "binary"])
def test_metrics_monotone_in_n(sig):
    s = _trivial(sig)
    prev = compute_metrics(s, 1)
    for n in range(2, 5):
        cur = compute_metrics(s, n)
        assert cur.v >= prev.v and cur.v_prime >= prev.v_prime
        prev = cur


def test_canonical_terms_number_variables_by_first_occurrence():
    sig = Signature((("f", 2),), (), ())
    terms = canonical_terms(sig, 1)
    assert App("f", (Var(0), Var(1))) in terms
    assert App("f", (Var(1), Var(0))) not in terms
    assert App("f", (Var(0), Var(0))) in terms


def test_cn_relational_is_trivial():
    s = generate_Cn(Signature((), (("R", 1),), ()), 1)
    M = next(iter(all_structures(s.signature, 2)))
    assert eval_sentence(M, s)


def test_cn_unary_n1():
    s = generate_Cn(Signature((("f", 1),), (), ()), 1)
    x = Var(0)
    ffx = App("f", (App("f", (x,)),))
    assert s.q == 1
    disjuncts = set(s.matrix.args)
    assert disjuncts == {Eq(ffx, x), Eq(ffx, App("f", (x,)))}


CN_SIGS = [
    Signature((("f", 1),), (), ()),
    Signature((("f", 1),), (), ("a",)),
    Signature((("f", 1), ("g", 1)), (), ()),
    Signature((("h", 2),), (), ()),
]


@pytest.mark.parametrize("sig", CN_SIGS, ids=["f", "f+a", "f+g", "h2"])
def test_cn_sound_on_small_structures(sig):
    n = 1
    s = generate_Cn(sig, n)
    sizes = (1, 2) if sig.max_function_arity() > 1 else (1, 2, 3, 4)
    for k in sizes:
        for M in all_structures(sig, k):
            assert eval_sentence(M, s) == _closes_within(M, n), M


def _closes_within(M, n):
    return all(closure(M, X).step <= n
               for r in range(M.size + 1) for X in itertools.combinations(range(M.size), r))


@settings(max_examples=200, deadline=None)
@given(structures(Signature((("h", 2),), (), ()), 3))
def test_cn_sound_binary_size_three(M):
    assert eval_sentence(M, generate_Cn(M.signature, 1)) == _closes_within(M, 1)


def test_cn_example_signature_n2():
    sig = load_fixture("example2").sentence.signature
    s = generate_Cn(sig, 2)
    for k in range(1, 4):
        for M in all_structures(sig, k):
            if eval_sentence(M, s):
                assert all(closure(M, X).step <= 2
                           for r in range(k + 1) for X in itertools.combinations(range(k), r))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SIGS), st.integers(1, 2))
def test_cn_roundtrips(sig, n):
    if sig.max_function_arity() > 1 and n > 1:
        return
    s = generate_Cn(sig, n)
    assert parse_sentence(print_sentence(s)) == s
