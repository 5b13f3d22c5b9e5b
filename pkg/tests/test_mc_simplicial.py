import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from linfmc import corpus
from linfmc.linfty_core import InftyMorphism, LInftyAlgebra, quotient_tower, sample_mc
from linfmc.mc_simplicial import (HornData, LiftError, Simplex, SimplicialError, apply_morphism,
                                  connect_by_edge, const_elem, degenerate_simplex, eface, face_simplex,
                                  fill_horn_abelian, fill_horn_nilpotent, kan_fibration_lift,
                                  lift_through_tower_step, lift_vertex, random_simplex, tcurv, tensor_algebra)
from linfmc.sullivan_forms import PolyForm

NILPOTENT = ["abelian", "dgl2", "gauge", "linf3", "heis4", "fib_source", "fib_target", "htt_B"]
seeds = st.integers(0, 10**6)


def dgl():
    return LInftyAlgebra.build([("x", 0, 1), ("y", 1, 2)], brackets={("x", "x"): {"y": 1}}, depth=3)


def line():
    """x of degree 0 with a primitive a; MC edges are x⊗f - a⊗df."""
    return LInftyAlgebra.build([("x", 0, 1), ("a", -1, 1)], differential={"a": {"x": 1}}, depth=2)


def edge(L, f):
    return Simplex(L, 1, {0: f, 1: -f.d()})


def is_degenerate(s: Simplex) -> bool:
    return s.n > 0 and any(degenerate_simplex(face_simplex(s, j), j) == s for j in range(s.n))


# tensor algebra


def test_tensor_algebra_n0_is_L():
    L = corpus.gauge()
    S = tensor_algebra(L, 0)
    x = const_elem(L.element({"x": 2, "g": 1}), 0)
    assert S.ell(1, [x]) == const_elem(L.d(L.element({"x": 2, "g": 1})), 0)


def test_tensor_differential_sign():
    L = corpus.abelian()
    S = tensor_algebra(L, 1)
    t, dt = PolyForm.t(1, 1), PolyForm.dt(1, 1)
    a, b = L.space.index("a"), L.space.index("b")
    # a has degree -1: D(a ⊗ t1) = b ⊗ t1 - a ⊗ dt1
    assert S.ell(1, [{a: t}]) == {b: t, a: -dt}
    assert S.ell(1, [{b: t}]) == {b: dt}


def test_tensor_bracket_hand_oracle():
    L = dgl()
    S = tensor_algebra(L, 1)
    x, y = 0, 1
    dt = PolyForm.dt(1, 1)
    one = PolyForm.const(1)
    out = S.ell(2, [{x: dt}, {x: one}])
    assert set(out) == {y} and out[y] == dt


# simplices


def test_simplex_rejects_non_mc_and_wrong_degree():
    L = dgl()
    with pytest.raises(SimplicialError):
        Simplex(L, 0, const_elem({0: 1}, 0))
    with pytest.raises(SimplicialError):
        Simplex(L, 1, {0: PolyForm.dt(1, 1)})


def test_constant_edge_faces_are_vertex():
    L = corpus.gauge()
    a = sample_mc(L, random.Random(3))
    v = Simplex.vertex(L, a)
    e = degenerate_simplex(v, 0)
    assert face_simplex(e, 0) == v and face_simplex(e, 1) == v
    with pytest.raises(SimplicialError):
        face_simplex(e, 2)


@given(st.sampled_from(NILPOTENT), seeds, st.integers(1, 2), st.data())
def test_simplicial_identities_on_random_simplices(name, seed, n, data):
    L = corpus.algebra(name)
    s = random_simplex(L, n, random.Random(seed))
    assert not tcurv(L, s.value)
    j = data.draw(st.integers(0, n))
    assert face_simplex(degenerate_simplex(s, j), j) == s
    assert face_simplex(degenerate_simplex(s, j), j + 1) == s
    if n >= 2:
        jj = data.draw(st.integers(1, n))
        i = data.draw(st.integers(0, jj - 1))
        assert face_simplex(face_simplex(s, jj), i) == face_simplex(face_simplex(s, i), jj - 1)


@given(seeds, st.integers(1, 2), st.data())
def test_apply_morphism_is_natural(seed, n, data):
    F = corpus.fib_morphism()
    s = random_simplex(F.source, n, random.Random(seed))
    i = data.draw(st.integers(0, n))
    assert apply_morphism(F, face_simplex(s, i)) == face_simplex(apply_morphism(F, s), i)
    assert apply_morphism(F, degenerate_simplex(s, i)) == degenerate_simplex(apply_morphism(F, s), i)


def test_apply_morphism_identity_and_strict():
    L = corpus.gauge()
    s = random_simplex(L, 2, random.Random(5))
    assert apply_morphism(InftyMorphism.identity(L), s) == s
    A = corpus.abelian()
    phi = InftyMorphism.strict(A, A, {"b": {"b": 3}, "a": {"a": 3}})
    s = random_simplex(A, 1, random.Random(2))
    img = apply_morphism(phi, s)
    ia, ib = A.space.index("a"), A.space.index("b")
    assert img.value == {i: 3 * c for i, c in s.value.items() if i in (ia, ib)}


# horns


def test_horn_compatibility_checked():
    L = line()
    e1 = edge(L, PolyForm.t(1, 1))
    e2 = edge(L, PolyForm.const(1, 5))
    with pytest.raises(SimplicialError):
        HornData(2, 1, {0: e1, 2: e2})
    with pytest.raises(SimplicialError):
        HornData(2, 1, {0: e1})


def test_abelian_fill_examples():
    L = line()
    v = Simplex(L, 0, {0: PolyForm.const(0, 2)})
    f = fill_horn_abelian(L, HornData(1, 0, {1: v}))
    assert f == degenerate_simplex(v, 0)
    e = degenerate_simplex(v, 0)
    f = fill_horn_abelian(L, HornData(2, 1, {0: e, 2: e}))
    assert f == degenerate_simplex(degenerate_simplex(v, 0), 0)
    # linear edges 1 -> 3 (face 2) and 3 -> 4 (face 0)
    t = PolyForm.t(1, 1)
    e02 = edge(L, PolyForm.const(1, 1) + 2 * t)
    e12 = edge(L, PolyForm.const(1, 3) + t)
    h = HornData(2, 1, {0: e12, 2: e02})
    f = fill_horn_abelian(L, h)
    assert face_simplex(f, 0) == e12 and face_simplex(f, 2) == e02
    assert face_simplex(f, 1).vertex_value(0) == {0: 1} and face_simplex(f, 1).vertex_value(1) == {0: 4}


def test_fill_abelian_rejects_non_abelian():
    L = dgl()
    v = Simplex.vertex(L, {})
    with pytest.raises(SimplicialError):
        fill_horn_abelian(L, HornData(1, 0, {1: v}))


@given(seeds, st.integers(1, 3), st.data())
def test_nilpotent_agrees_with_abelian(seed, m, data):
    L = corpus.abelian()
    k = data.draw(st.integers(0, m))
    s = random_simplex(L, m, random.Random(seed))
    h = HornData.of(s, k)
    assert fill_horn_nilpotent(L, h) == fill_horn_abelian(L, h)


def test_degenerate_horn_gives_degenerate_filler():
    L = corpus.gauge()
    v = Simplex.vertex(L, sample_mc(L, random.Random(11)))
    e = degenerate_simplex(v, 0)
    f = fill_horn_nilpotent(L, HornData(2, 1, {0: e, 2: e}))
    assert f == degenerate_simplex(e, 0)
    assert is_degenerate(f)


def test_dg_lie_horn_from_two_edges():
    L = corpus.gauge()
    rng = random.Random(4)
    s = random_simplex(L, 2, rng)
    h = HornData.of(s, 1)
    f = fill_horn_nilpotent(L, h)
    for i in (0, 2):
        assert face_simplex(f, i) == h.faces[i]
    assert not tcurv(L, f.value)


@given(st.sampled_from(NILPOTENT), seeds, st.integers(1, 3), st.data())
def test_nilpotent_filling_property(name, seed, m, data):
    L = corpus.algebra(name)
    k = data.draw(st.integers(0, m))
    rng = random.Random(seed)
    s = random_simplex(L, m, rng)
    h = HornData.of(s, k)
    f = fill_horn_nilpotent(L, h, rng=rng if seed % 2 else None)
    assert not tcurv(L, f.value)
    for i, g in h.faces.items():
        assert eface(f.value, i) == g.value


# lifting


def test_tower_step_identity_has_trivial_eta():
    L = corpus.gauge()
    Id = InftyMorphism.identity(L)
    s = random_simplex(L, 1, random.Random(9))
    h = HornData.of(s, 0)
    assert kan_fibration_lift(Id, h, s).simplex == s
    theta = fill_horn_nilpotent(L, h)
    res = kan_fibration_lift(Id, h, theta)
    assert res.simplex == theta
    assert all(r.eta_zero and r.lambda_zero for r in res.records)


def test_tower_step_with_zero_target_is_filling():
    L = corpus.gauge()
    s = random_simplex(L, 2, random.Random(12))
    h = HornData.of(s, 2)
    alpha = {}
    for n in (2, 3):
        g = {i: {j: c for j, c in f.value.items() if L.space.weights[j] < n} for i, f in h.faces.items()}
        alpha, rec = lift_through_tower_step(L, None, n, g, 2, 2, alpha, None)
        assert rec.eta_zero
    assert fill_horn_nilpotent(L, h).value == alpha


def test_abelianization_edge_lift():
    F = corpus.abelianization()
    rng = random.Random(21)
    s = random_simplex(F.source, 1, rng)
    b = apply_morphism(F, s)
    h = HornData.of(s, 0)
    res = kan_fibration_lift(F, h, b)
    a = res.simplex
    assert eface(a.value, 1) == h.faces[1].value
    assert F.data().pushforward(a.value) == b.value
    assert not tcurv(F.source, a.value)


def test_lift_rejects_incompatible_data():
    F = corpus.fib_morphism()
    rng = random.Random(2)
    s = random_simplex(F.source, 1, rng)
    b = apply_morphism(F, random_simplex(F.source, 1, random.Random(99)))
    h = HornData.of(s, 0)
    if F.data().pushforward(h.faces[1].value) != eface(b.value, 1):
        with pytest.raises(SimplicialError):
            kan_fibration_lift(F, h, b)


def test_lift_rejects_non_fibration():
    Z = LInftyAlgebra.build([], depth=3)
    T = LInftyAlgebra.build([("a", -1, 1), ("b", 0, 1)], differential={"a": {"b": 1}}, depth=3)
    F = InftyMorphism.strict(Z, T, {})
    with pytest.raises(LiftError):
        kan_fibration_lift(F, None, Simplex.vertex(T, {}))


def test_degenerate_lift_is_degenerate():
    F = corpus.fib_morphism()
    a = sample_mc(F.source, random.Random(8))
    v = Simplex.vertex(F.source, a)
    e = degenerate_simplex(v, 0)
    b = apply_morphism(F, degenerate_simplex(e, 0))
    res = kan_fibration_lift(F, HornData(2, 0, {1: e, 2: e}), b)
    assert res.simplex == degenerate_simplex(e, 0)


@given(seeds, st.integers(1, 2), st.data())
def test_fibration_lift_property(seed, m, data):
    F = corpus.fib_morphism()
    k = data.draw(st.integers(0, m))
    rng = random.Random(seed)
    s = random_simplex(F.source, m, rng)
    h = HornData.of(s, k)
    # target: the image of a random other filler of the same horn
    b = apply_morphism(F, fill_horn_nilpotent(F.source, h, rng))
    res = kan_fibration_lift(F, h, b)
    a = res.simplex
    assert not tcurv(F.source, a.value)
    for i, g in h.faces.items():
        assert eface(a.value, i) == g.value
    assert F.data().pushforward(a.value) == b.value
    assert all(r.eta_closed and r.eta_vanishes_on_horn for r in res.records)


@given(seeds)
def test_vertex_lifting_is_surjective_on_objects(seed):
    F = corpus.fib_morphism()
    b = sample_mc(F.target, random.Random(seed))
    a = lift_vertex(F, b)
    assert F.data().pushforward(const_elem(a, 0)) == const_elem(b, 0)


# edges


def test_connect_same_vertex_is_degenerate():
    L = corpus.gauge()
    a = sample_mc(L, random.Random(1))
    r = connect_by_edge(L, a, a)
    assert r.found and r.edge == degenerate_simplex(Simplex.vertex(L, a), 0)


def test_connect_abelian_examples():
    L = corpus.abelian()
    b, k = L.space.index("b"), L.space.index("k")
    r = connect_by_edge(L, {}, {b: Q(3)})
    assert r.found and r.edge.vertex_value(1) == {b: 3}
    r = connect_by_edge(L, {}, {k: Q(1)})
    assert not r.found and r.weight == 1


def test_connect_gauge_equivalent_pair():
    L = corpus.gauge()
    rng = random.Random(17)
    e = random_simplex(L, 1, rng)
    a0, a1 = e.vertex_value(0), e.vertex_value(1)
    r = connect_by_edge(L, a0, a1)
    assert r.found
    assert r.edge.vertex_value(0) == a0 and r.edge.vertex_value(1) == a1
    assert not tcurv(L, r.edge.value)


def test_connect_rejects_non_mc():
    L = dgl()
    with pytest.raises(SimplicialError):
        connect_by_edge(L, {0: Q(1)}, {})
