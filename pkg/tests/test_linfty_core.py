import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from linfmc import corpus
from linfmc.gradedlinalg import GradedMap
from linfmc.linfty_core import (InftyMorphism, LInftyAlgebra, LInftyError, MCElement, check_linfty,
                                check_morphism, classify_morphism, compose, curv, is_mc, pushforward, quotient,
                                quotient_tower, sample_mc, twist)


def dgl():
    return LInftyAlgebra.build([("x", 0, 1), ("y", 1, 2)], brackets={("x", "x"): {"y": 1}}, depth=3)


def test_abelian_passes():
    assert check_linfty(corpus.abelian()).ok


def test_dg_lie_passes_and_curvature():
    L = dgl()
    assert check_linfty(L).ok
    for c in (0, 1, 3, Q(-2, 5)):
        assert curv(L, L.element({"x": c})) == L.element({"y": Q(c * c, 2)})
    assert is_mc(L, {})
    assert not is_mc(L, L.element({"x": 2}))


def test_broken_bracket_reports_jacobi_word():
    # {x,y} = w next to {x,x} = y: the ternary identity on (x, x, x) fails
    L = LInftyAlgebra.build([("x", 0, 1), ("y", 1, 2), ("w", 2, 3)],
                            brackets={("x", "x"): {"y": 1}, ("x", "y"): {"w": 1}}, depth=4)
    r = check_linfty(L)
    assert not r.ok
    assert r.first.arity == 3 and r.first.word == ("x", "x", "x")
    assert r.first.residual == {"w": 3}


def test_abelian_curvature_is_differential():
    L = LInftyAlgebra.build([("x", 0, 1), ("y", 1, 1)], differential={"x": {"y": 1}}, depth=2)
    assert curv(L, L.element({"x": 1})) == L.element({"y": 1})
    Z = LInftyAlgebra.build([("x", 0, 1), ("z", 0, 1)], depth=2)
    assert is_mc(Z, Z.element({"x": 5, "z": -1}))


def test_wrong_degree_rejected():
    L = dgl()
    with pytest.raises(LInftyError):
        curv(L, L.element({"y": 1}))
    with pytest.raises(LInftyError):
        MCElement(L, L.element({"x": 1}))


def test_validation_errors():
    with pytest.raises(LInftyError):  # degree
        LInftyAlgebra.build([("x", 0, 1), ("y", 0, 2)], brackets={("x", "x"): {"y": 1}}, depth=3)
    with pytest.raises(LInftyError):  # weight additivity
        LInftyAlgebra.build([("x", 0, 1), ("y", 1, 1)], brackets={("x", "x"): {"y": 1}}, depth=3)
    with pytest.raises(LInftyError):  # odd repeat
        LInftyAlgebra.build([("g", -1, 1), ("y", -1, 2)], brackets={("g", "g"): {"y": 1}}, depth=3)
    with pytest.raises(LInftyError):  # weight beyond depth
        LInftyAlgebra.build([("x", 0, 3)], depth=3)


def test_pushforward_examples():
    L = corpus.gauge()
    rng = random.Random(1)
    a = sample_mc(L, rng)
    assert pushforward(InftyMorphism.identity(L), a) == a
    A = corpus.abelian()
    phi = InftyMorphism.strict(A, A, {"b": {"b": 2}, "a": {"a": 2}})
    assert check_morphism(phi).ok
    a = A.element({"b": 3, "k": 1})
    assert pushforward(phi, a) == A.element({"b": 6})
    F = corpus.fib_morphism()
    assert pushforward(F, {}) == {}


def test_pushforward_rejects_non_mc():
    L = dgl()
    with pytest.raises(LInftyError):
        pushforward(InftyMorphism.identity(L), L.element({"x": 1}))


def test_twist_examples():
    L = corpus.gauge()
    assert twist(L, {}) == L
    A = corpus.abelian()
    assert twist(A, A.element({"b": 1, "k": -2})) == A


def test_twisted_differential_hand_oracle():
    L = LInftyAlgebra.build(
        [("z", -1, 1), ("x", 0, 1), ("u", 0, 2), ("v", 0, 3), ("y", 1, 2)],
        brackets={("x", "x"): {"y": 1}, ("x", "z"): {"u": 1}, ("u", "z"): {"v": 1}}, depth=4)
    assert check_linfty(L).ok
    a = L.element({"u": 2})
    assert is_mc(L, a)
    La = twist(L, a)
    assert La.d(L.element({"z": 1})) == L.element({"v": 2})
    assert check_linfty(La).ok


def test_twist_rejects_non_mc():
    L = dgl()
    with pytest.raises(LInftyError):
        twist(L, L.element({"x": 1}))


def test_quotient_tower_examples():
    L = dgl()
    Q3, p3, i2 = quotient_tower(L, 3)
    assert Q3 is L and quotient(L, 3) is L
    Q2 = quotient(L, 2)
    assert Q2.space.names == ("x",) and Q2.brackets == {}
    assert i2.source.space.names == ("y",) and i2.source.is_abelian()
    for n in (2, 3):
        assert classify_morphism(quotient_tower(L, n)[1]).fibration
    with pytest.raises(LInftyError):
        quotient_tower(L, 4)


def test_classification_examples():
    L = corpus.gauge()
    c = classify_morphism(InftyMorphism.identity(L))
    assert (c.weak_equivalence, c.fibration, c.acyclic_fibration) == (True, True, True)
    Z = LInftyAlgebra.build([], depth=3)
    T = LInftyAlgebra.build([("a", -1, 1), ("b", 0, 1)], differential={"a": {"b": 1}}, depth=3)
    zero = InftyMorphism.strict(Z, T, {})
    c = classify_morphism(zero)
    assert c.weak_equivalence and not c.fibration
    assert classify_morphism(corpus.fib_morphism()).acyclic_fibration
    assert classify_morphism(corpus.abelianization()).acyclic_fibration
    p = classify_morphism(corpus.morphisms()["p3_abelian"])  # forgets the cocycle m
    assert p.fibration and not p.weak_equivalence


def test_compose_examples():
    F = corpus.fib_morphism()
    assert compose(InftyMorphism.identity(F.target), F) == F
    assert compose(F, InftyMorphism.identity(F.source)) == F
    A = corpus.abelian()
    f = InftyMorphism.strict(A, A, {"b": {"b": 2}})
    g = InftyMorphism.strict(A, A, {"b": {"b": 3}})
    gf = compose(g, f)
    assert gf.is_strict() and gf.linear().entries == {(A.space.index("b"), A.space.index("b")): 6}


def test_compose_arity_two_hand_oracle():
    S = LInftyAlgebra.build([("x", 0, 1)], depth=3)
    M = LInftyAlgebra.build([("x", 0, 1), ("z", 0, 2)], depth=3)
    F = InftyMorphism.build(S, M, {("x",): {"x": 1}, ("x", "x"): {"z": 1}})
    G = InftyMorphism.build(M, M, {("x",): {"x": 1}, ("z",): {"z": 1}, ("x", "x"): {"z": 3}})
    GF = compose(G, F)
    assert check_morphism(GF).ok
    assert GF(S.element({"x": 1}), S.element({"x": 1})) == M.element({"z": 4})


def test_broken_morphism_detected():
    S, T = corpus.fib_source(), corpus.fib_target()
    comps = {(n,): {n: 1} for n in ("g", "x", "u", "y")}
    F = InftyMorphism.build(S, T, comps)
    r = check_morphism(F)
    assert not r.ok and r.first.arity == 2


def test_morphism_weight_condition_enforced():
    S = LInftyAlgebra.build([("x", 0, 2)], depth=3)
    T = LInftyAlgebra.build([("x", 0, 1)], depth=3)
    with pytest.raises(LInftyError):
        InftyMorphism.build(S, T, {("x",): {"x": 1}})


NILPOTENT = ["abelian", "dgl2", "gauge", "linf3", "heis4", "fib_source", "fib_target", "htt_B"]


@given(st.sampled_from(NILPOTENT), st.integers(0, 10**6))
def test_twisting_preserves_relations(name, seed):
    L = corpus.algebra(name)
    a = sample_mc(L, random.Random(seed))
    assert is_mc(L, a)
    assert check_linfty(twist(L, a)).ok


@given(st.sampled_from(NILPOTENT), st.integers(0, 10**6))
def test_twist_of_twist(name, seed):
    L = corpus.algebra(name)
    rng = random.Random(seed)
    a = sample_mc(L, rng)
    La = twist(L, a)
    b = sample_mc(La, rng)
    ab = {i: c for i in set(a) | set(b) if (c := a.get(i, 0) + b.get(i, 0))}
    assert is_mc(L, ab)
    assert twist(La, b) == twist(L, ab)


@given(st.integers(0, 10**6))
def test_pushforward_preserves_mc_and_composition(seed):
    rng = random.Random(seed)
    ms = corpus.morphisms()
    F = ms["fib"]
    _, p, _ = quotient_tower(F.target, F.target.depth)
    a = sample_mc(F.source, rng)
    b = pushforward(F, a)
    assert is_mc(F.target, b)
    assert pushforward(compose(p, F), a) == pushforward(p, b)
