import itertools

import pytest
from hypothesis import given, settings

from localsent.combinators import load_fixture
from localsent.logic import Signature
from localsent.structures import (
    StructureError, closure, dump_structure, eval_sentence, generated_substructure, load_structure,
    make_structure,
)

from oracles import naive_closure, naive_layers, naive_satisfies
from strategies import SIG_BINARY, SIG_UNARY, sentences, structure_and_subset, structures

EX = load_fixture("example2").sentence


def example_model():
    return make_structure(EX.signature, 2, functions={"i": {0: 0, 1: 0}}, relations={"P": [0]},
                          constants={"a": 1})


def test_example_two_element_model():
    assert eval_sentence(example_model(), EX)


def test_example_one_element_model_fails():
    M = make_structure(EX.signature, 1, functions={"i": {0: 0}}, relations={"P": [0]}, constants={"a": 0})
    assert not eval_sentence(M, EX)


def test_closure_of_empty_set_adds_constants_first():
    tr = closure(example_model(), [])
    assert tr.cl(1) == {1}
    assert tr.closure == {0, 1}
    assert tr.step == 2


def test_closure_of_domain_is_immediate():
    assert closure(example_model(), [0, 1]).step == 1


def test_relational_closure_is_identity():
    sig = Signature((), (("R", 1),), ())
    M = make_structure(sig, 3, relations={"R": [1]})
    assert closure(M, [2]).closure == {2}
    sub = generated_substructure(M, [2])
    assert sub.structure.size == 1 and sub.index_map == (2,)


def test_generated_substructure_of_example():
    sub = generated_substructure(example_model(), [1])
    assert sub.index_map == (0, 1)
    assert sub.structure == example_model()


def test_functions_must_be_total():
    sig = Signature((("f", 1),), (), ())
    with pytest.raises(StructureError):
        make_structure(sig, 2, functions={"f": {0: 1}})


def test_dump_roundtrip():
    M = example_model()
    assert load_structure(dump_structure(M), M.signature) == M
    assert dump_structure(M).splitlines()[0] == "domain 2"


@settings(max_examples=200, deadline=None)
@given(sentences(SIG_UNARY), structures(SIG_UNARY))
def test_eval_agrees_with_oracle_unary(s, M):
    assert eval_sentence(M, s) == naive_satisfies(M, s)


@settings(max_examples=200, deadline=None)
@given(sentences(SIG_BINARY), structures(SIG_BINARY))
def test_eval_agrees_with_oracle_binary(s, M):
    assert eval_sentence(M, s) == naive_satisfies(M, s)


@settings(max_examples=200, deadline=None)
@given(structure_and_subset(SIG_BINARY))
def test_closure_agrees_with_oracle(case):
    M, X = case
    tr = closure(M, X)
    assert tr.closure == naive_closure(M, X)
    assert list(tr.layers) == naive_layers(M, X)


@settings(max_examples=100, deadline=None)
@given(structure_and_subset(SIG_UNARY, 4))
def test_closure_monotone_and_idempotent(case):
    M, X = case
    tr = closure(M, X)
    assert all(a <= b for a, b in zip(tr.layers, tr.layers[1:]))
    assert closure(M, tr.closure).closure == tr.closure
    for x in M.domain:
        assert tr.closure <= closure(M, set(X) | {x}).closure
    assert generated_substructure(M, tr.closure) == generated_substructure(M, X)


def test_closure_step_at_most_domain_size():
    sig = Signature((("f", 1),), (), ())
    for M in _chains(sig, 4):
        for r in range(1, 5):
            for X in itertools.combinations(range(4), r):
                assert closure(M, X).step <= 4


def _chains(sig, k):
    for vals in itertools.product(range(k), repeat=k):
        yield make_structure(sig, k, functions={"f": dict(enumerate(vals))})
