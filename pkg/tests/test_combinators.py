import itertools

import pytest

from localsent.combinators import (
    PHI_SIGNATURE_SYMBOLS, CombinatorResult, FixtureError, SymbolClash, build_Phi, build_phi1, build_phi_n,
    build_psi_prime_n, build_Sn, build_Tn, load_fixture, star, star_psi,
)
from localsent.logic import And, Bottom, Eq, Iff, Implies, Lt, Not, Or, Rel, Signature, Top
from localsent.parser import parse_sentence
from localsent.printer import print_sentence
from localsent.search import enumerate_models, finite_spectrum
from localsent.structures import eval_sentence, make_structure, reduct, restrict

from oracles import sums_spectrum

PHI0 = load_fixture("phi0")
THETA = load_fixture("theta")
BETA = load_fixture("beta")
SINGLE = load_fixture("singleton")


def _quantifier_free(f) -> bool:
    if isinstance(f, (Eq, Lt, Rel, Top, Bottom)):
        return True
    if isinstance(f, Not):
        return _quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(_quantifier_free(a) for a in f.args)
    if isinstance(f, (Implies, Iff)):
        return _quantifier_free(f.left) and _quantifier_free(f.right)
    return False


def _in(M, rel, x):
    return (x,) in M.relations[rel]


# -- closure-bound arithmetic -----------------------------------------------------


def test_star_bound():
    assert star(THETA).n == THETA.n + 1
    assert star(load_fixture("example2")).n == 3


def test_star_psi_bound():
    assert star_psi(load_fixture("example2"), SINGLE).n == 4
    assert star_psi(THETA, BETA).n == THETA.n + BETA.n + 1


def test_level_bounds():
    assert build_phi1(PHI0).n == 3
    assert [build_phi_n(PHI0, k).n for k in range(4)] == [2, 3, 4, 5]


def test_Sn_bound():
    for n in (1, 2):
        assert build_Sn(THETA, n, PHI0).n == THETA.n + build_phi_n(PHI0, n).n + 2


def test_psi_prime_bound():
    for n in (1, 2):
        assert build_psi_prime_n(THETA, n, PHI0).n == THETA.n + 1 + build_phi_n(PHI0, n - 1).n


# -- star ---------------------------------------------------------------------------


def test_star_of_theta_has_every_size():
    assert finite_spectrum(star(THETA).sentence, 6).sizes() == {1, 2, 3, 4, 5, 6}


def test_star_uses_fresh_names():
    s = parse_sentence("# steps: 1\nsig { fn I/1; } forall x . I(x) = x")
    out = star(CombinatorResult(s, 1, ("ident",)))
    assert "I" in out.sentence.symbols() and "I_1" in out.sentence.symbols()


def test_outputs_are_universal_and_roundtrip():
    for res in (star(THETA), star_psi(THETA, BETA), build_phi1(PHI0), build_Sn(THETA, 1, PHI0),
                build_psi_prime_n(THETA, 1, PHI0), build_Tn(SINGLE, 1, THETA, PHI0), build_Phi(PHI0)):
        assert _quantifier_free(res.sentence.matrix)
        assert parse_sentence(print_sentence(res.sentence)) == res.sentence


# -- star_psi --------------------------------------------------------------------


@pytest.mark.parametrize("phi,psi", [(THETA, BETA), (BETA, THETA), (SINGLE, BETA)],
                         ids=["theta-beta", "beta-theta", "singleton-beta"])
def test_star_psi_spectrum_law(phi, psi):
    sp_phi = finite_spectrum(phi.sentence, 6).sizes()
    sp_psi = finite_spectrum(psi.sentence, 6).sizes()
    got = finite_spectrum(star_psi(phi, psi).sentence, 6).sizes()
    assert got == sums_spectrum(sp_phi, sp_psi, 6)


def test_theta_star_beta_sizes_are_even_sums():
    assert finite_spectrum(load_fixture("theta_star_beta").sentence, 6).sizes() == {2, 3, 4, 5, 6}


def test_star_psi_rejects_shared_symbols():
    with pytest.raises(SymbolClash):
        star_psi(THETA, THETA)


# -- phi1 and the level tower ----------------------------------------------------


def test_phi1_needs_the_pairing_signature():
    with pytest.raises(FixtureError):
        build_phi1(THETA)


def _models(res, sizes):
    for k in sizes:
        yield from enumerate_models(res.sentence, k)


def test_phi1_finite_models():
    phi1 = build_phi1(PHI0)
    count = 0
    for M in _models(phi1, (1, 2, 3, 4, 5)):
        count += 1
        Q = [x for x in M.domain if _in(M, "Q", x)]
        rest = [x for x in M.domain if x not in Q]
        # injection: the non-Q elements below any non-Q element fit into Q
        for x in rest:
            assert len([y for y in rest if y < x]) <= len(Q)
        # the Q-segment, read in the pairing signature, is a model of phi0
        if Q:
            sub = restrict(M, Q).structure
            assert eval_sentence(reduct(sub, PHI0.sentence.signature), PHI0.sentence)
        # projections are trivial off Q
        for x in rest:
            assert M.apply("p1", (x,)) == x and M.apply("p2", (x,)) == x
    assert count > 0


def test_phi_n_level_one_is_phi1():
    assert build_phi_n(PHI0, 1).sentence == build_phi1(PHI0).sentence
    assert build_phi_n(PHI0, 0) == PHI0


def test_each_level_adds_one_predicate_and_one_function():
    prev = build_phi_n(PHI0, 1).sentence.signature
    for k in (2, 3):
        cur = build_phi_n(PHI0, k).sentence.signature
        assert len(cur.relations) == len(prev.relations) + 1
        assert len(cur.functions) == len(prev.functions) + 1
        new_fn = set(cur.functions) - set(prev.functions)
        assert {ar for _, ar in new_fn} == {2}
        prev = cur


def test_level_segments_nest():
    phi2 = build_phi_n(PHI0, 2)
    for M in _models(phi2, (1, 2, 3, 4, 5)):
        Q1 = {x for x in M.domain if _in(M, "Q", x)}
        Q2 = {x for x in M.domain if _in(M, "Q_2", x)}
        for S in (Q1, Q2):
            assert S == set(range(len(S)))
        assert Q1 <= Q2


# -- Phi ------------------------------------------------------------------------------


def tree_model():
    """Ten elements: q0 q1 | c0 c1 c2 | r u w | b1 b2.

    The tree on P2 has root r with children u and w; the branches b1, b2 run
    through u and w and split at the level of u.  P0 u P1 carries the level
    construction with Q = P0, where the pairing part is the two-element model
    p1 = p2 = 0, f(0,0) = 1.
    """
    s = load_fixture("Phi").sentence
    q0, q1, c0, c1, c2, r, u, w, b1, b2 = range(10)
    f = {(q0, q0): q1}
    g = {(c1, c0): q0, (c2, c0): q0, (c2, c1): q1}
    I = {w: u}
    i = {r: q0, u: q0, w: q1}
    j = {r: c0, u: c1, w: c2}
    h = {(u, b2): w}
    k = {(b1, b2): u, (b2, b1): u}
    l_ = {(b2, b1): r}
    return s, make_structure(
        s.signature, 10,
        functions={
            "f": lambda x, y: f.get((x, y), x),
            "g": lambda x, y: g.get((x, y), x),
            "p1": lambda x: q0 if x in (q0, q1) else x,
            "p2": lambda x: q0 if x in (q0, q1) else x,
            "p": lambda x, y: x,
            "I": lambda x: I.get(x, x),
            "i": lambda x: i.get(x, x),
            "j": lambda x: j.get(x, x),
            "h": lambda x, y: h.get((x, y), x),
            "k": lambda x, y: k.get((x, y), x),
            "l": lambda x, y: l_.get((x, y), x),
        },
        relations={
            "P0": [q0, q1], "P1": [c0, c1, c2], "P2": [r, u, w], "P3": [b1, b2],
            "Q": [q0, q1], "prec": [(r, u), (r, w)],
        },
    )


def test_Phi_signature():
    s = build_Phi(PHI0).sentence
    assert s.signature.symbols() == PHI_SIGNATURE_SYMBOLS
    assert len(PHI_SIGNATURE_SYMBOLS) == 18


def test_Phi_holds_in_tree_model():
    s, M = tree_model()
    assert eval_sentence(M, s)


@pytest.mark.parametrize("fn,args,value", [("i", (7,), 0), ("j", (7,), 3), ("h", (6, 9), 6)],
                         ids=["level-not-injective", "j-not-increasing", "branches-merge"])
def test_Phi_fails_on_broken_tree(fn, args, value):
    s, M = tree_model()
    tables = {name: dict(t) for name, t in M.functions.items()}
    tables[fn][args] = value
    broken = make_structure(s.signature, 10, functions=tables, relations=dict(M.relations))
    assert not eval_sentence(broken, s)


# -- S_n, psi'_n, T_n -------------------------------------------------------------


def test_Sn_rejects_clash():
    with pytest.raises(SymbolClash):
        build_Sn(CombinatorResult(parse_sentence("sig { fn f/2; } forall x . f(x,x) = x"), 1, ("c",)), 1, PHI0)


def test_Sn_finite_model_shape():
    res = build_Sn(THETA, 1, PHI0)
    count = 0
    for M in _models(res, (1, 2, 3, 4, 5)):
        count += 1
        R1, R2, R3 = ([x for x in M.domain if _in(M, R, x)] for R in ("R1", "R2", "R3"))
        assert R1 + R2 + R3 == list(M.domain)
        for x, y in itertools.combinations(R2, 2):
            assert M.apply("s", (x,)) < M.apply("s", (y,))
        assert all(M.apply("s", (x,)) in R1 for x in R2)
        for x in R3:
            below = [y for y in R3 if y < x]
            images = {M.apply("t", (x, y)) for y in below}
            assert len(images) == len(below) and images <= set(R2)
    assert count > 0


def test_psi_prime_finite_model_shape():
    res = build_psi_prime_n(THETA, 1, PHI0)
    count = 0
    for M in _models(res, (1, 2, 3, 4, 5)):
        count += 1
        R = [x for x in M.domain if _in(M, "R", x)]
        assert R == list(range(len(R)))
        rest = [x for x in M.domain if x not in R]
        for x in rest:
            below = [y for y in rest if y < x]
            assert len({M.apply("t", (x, y)) for y in below}) == len(below)
        # t is the first projection outside its injection role
        for x, y in itertools.product(M.domain, repeat=2):
            if x in R or y in R or not y < x:
                assert M.apply("t", (x, y)) == x
    assert count > 0


def test_Tn_is_two_stage_composition():
    res = build_Tn(SINGLE, 1, THETA, PHI0)
    assert res.sentence == star_psi(THETA, build_psi_prime_n(SINGLE, 1, PHI0)).sentence
    assert res.provenance[1].startswith("stage 2: star_psi(theta")
    assert res.provenance[2].startswith("stage 1: psi'_1")


def test_Tn_spectrum_law():
    pp = build_psi_prime_n(SINGLE, 1, PHI0)
    got = finite_spectrum(build_Tn(SINGLE, 1, THETA, PHI0).sentence, 6).sizes()
    expected = sums_spectrum(finite_spectrum(THETA.sentence, 6).sizes(), finite_spectrum(pp.sentence, 6).sizes(), 6)
    assert got == expected


def test_unused_signature_helper():
    assert Signature().symbols() == {"<"}
