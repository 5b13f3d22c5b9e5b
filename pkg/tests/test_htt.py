from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from linfmc import corpus
from linfmc.gradedlinalg import ChainComplex, GradedMap, GradedSpace
from linfmc.htt import (ConvAlgebra, CylTriple, TransferError, classify_piB, connect_solutions, cyl_curvature,
                        cylinder_complexes, hom_complex, project_piB, transfer, trivial_triple)
from linfmc.linfty_core import LInftyAlgebra


def named_q(t):
    return t.named()["Q_A"]


def named_f(t):
    return t.named()["F"]


def abelian_pair():
    """B abelian with a primitive e of the cocycle b; A = span(ha), φ(ha) = a."""
    B = LInftyAlgebra.build([("a", 0, 1), ("e", -1, 2), ("b", 0, 2)], differential={"e": {"b": 1}}, depth=3)
    A = ChainComplex.zero(GradedSpace.from_basis([("ha", 0, 1)]))
    phi = GradedMap.from_columns(A.space, B.space, 0, {0: {0: 1}})
    return B, A, phi


def test_curvature_of_strict_abelian_triple_is_zero():
    B, A, phi = abelian_pair()
    assert cyl_curvature(trivial_triple(A, B, phi, 3)).zero


def test_curvature_detects_non_chain_map():
    B = corpus.htt_B()
    A = ChainComplex.zero(GradedSpace.from_basis([("hb", 0, 2)]))
    phi = GradedMap.from_columns(A.space, B.space, 0, {0: {B.space.index("b1"): 1}})
    cert = cyl_curvature(trivial_triple(A, B, phi, 2))
    assert not cert.zero and cert.F and not cert.A and not cert.B
    assert cert.F[0].arity == 1
    with pytest.raises(TransferError):
        transfer(B, A, phi, 2)


def test_transfer_dg_lie_hand_oracle():
    res = transfer(corpus.htt_B(), corpus.htt_A(), corpus.htt_phi(), arity_cap=4)
    assert res.ok and res.quasi_iso
    t = res.triple
    assert named_q(t)[2] == {("ha", "ha"): {"hc": 1}}
    assert named_f(t)[2] == {("ha", "ha"): {"b1": -1}}
    assert cyl_curvature(t, corpus.htt_phi()).zero
    assert t.linear_components() == {(0,): {0: 1}, (1,): {3: 1}}
    assert project_piB(t) == corpus.htt_B().brackets


def test_transfer_abelian_is_strict():
    B, A, phi = abelian_pair()
    res = transfer(B, A, phi, arity_cap=4)
    assert res.ok and res.triple.q == {} and res.triple.f == {}
    assert project_piB(res.triple) == {}


def test_transfer_along_isomorphism_conjugates():
    B = corpus.htt_B()
    Bc = B.chain_complex()
    two = GradedMap.from_columns(Bc.space, B.space, 0, {i: {i: 2} for i in range(B.space.dim)})
    res = transfer(B, Bc, two, arity_cap=3)
    assert res.ok
    # φ^{-1}{φx, φy} = 2{x, y}
    assert res.triple.q[2] == {k: {o: 2 * c for o, c in v.items()} for k, v in B.brackets[2].items()}
    assert res.triple.f == {}


def test_broken_phi_obstruction():
    res = transfer(corpus.htt_B(), corpus.htt_A_broken(), corpus.htt_phi_broken(), arity_cap=4)
    assert not res.ok and res.quasi_iso is False
    ob = res.obstruction
    assert ob.arity == 2 and ob.degree == 0 and ob.value != 0
    assert ("F", ("ha", "ha"), "c") in ob.equations


def test_transfer_rejects_bad_input():
    B = corpus.htt_B()
    A = corpus.htt_A()
    wrong_degree = GradedMap.from_columns(A.space, B.space, 1, {0: {B.space.index("b2"): 1}})
    with pytest.raises(TransferError):
        transfer(B, A, wrong_degree)


def test_pivot_orders_give_distinct_connected_solutions():
    B, A, phi = corpus.htt_B5(), corpus.htt_A5(), corpus.htt_phi5()
    t0 = transfer(B, A, phi, 4, "lex").triple
    t1 = transfer(B, A, phi, 4, "revlex").triple
    assert t0 != t1
    r = connect_solutions(t0, t1)
    assert r.ok and not r.edge.is_degenerate()
    assert r.edge.endpoint(0) == t0 and r.edge.endpoint(1) == t1
    assert r.edge.residuals() == {}


def test_connect_identical_is_degenerate():
    t = transfer(corpus.htt_B(), corpus.htt_A(), corpus.htt_phi(), 4).triple
    r = connect_solutions(t, t)
    assert r.ok and r.edge.is_degenerate()


def test_connect_chain_homotopic_abelian_solutions():
    B, A, phi = abelian_pair()
    t0 = trivial_triple(A, B, phi, 3)
    t1 = CylTriple(A, B, phi, {}, {2: {(0, 0): {2: Q(1)}}}, 3)   # F2(ha, ha) = b = ∂e
    assert cyl_curvature(t1).zero
    r = connect_solutions(t0, t1)
    assert r.ok
    assert r.edge.endpoint(1) == t1 and r.edge.endpoint(0) == t0


def test_connect_rejects_different_fibers():
    B, A, phi = corpus.htt_B(), corpus.htt_A(), corpus.htt_phi()
    t = transfer(B, A, phi, 3).triple
    bad = CylTriple(A, B, phi, {}, {}, 3)
    with pytest.raises(TransferError):
        connect_solutions(t, bad)


def test_piB_classification():
    c = classify_piB(corpus.htt_A(), corpus.htt_B(), corpus.htt_phi(), 3)
    assert c.strict and c.acyclic_fibration
    c = classify_piB(corpus.htt_A_broken(), corpus.htt_B(), corpus.htt_phi_broken(), 3)
    assert c.fibration and not c.weak_equivalence


def test_cylinder_complexes_square_to_zero():
    Cyl, HB, piB = cylinder_complexes(corpus.htt_A5(), corpus.htt_B5(), corpus.htt_phi5(), 2)
    # the ChainComplex constructor checks δ² = 0; π_B must be a chain map
    for s in range(Cyl.space.dim):
        lhs = HB.differential(piB.column(s))
        rhs = piB(Cyl.differential.column(s))
        assert lhs == rhs


def test_conv_algebra_mc_is_linfty():
    t = transfer(corpus.htt_B(), corpus.htt_A(), corpus.htt_phi(), 4).triple
    C = ConvAlgebra(corpus.htt_A(), 4)
    assert C.is_mc(t.q)
    assert C.complex().space.dim > 0
    A = ChainComplex.zero(GradedSpace.from_basis([("x", 0, 1), ("y", 1, 1), ("w", 2, 1)]))
    bad = {2: {(0, 0): {1: Q(1)}, (0, 1): {2: Q(1)}}}
    assert not ConvAlgebra(A, 3).is_mc(bad)


@given(st.integers(1, 3), st.sampled_from(["lex", "revlex"]))
def test_transfer_outputs_are_solutions(cap, order):
    for B, A, phi in ((corpus.htt_B(), corpus.htt_A(), corpus.htt_phi()),
                      (corpus.htt_B5(), corpus.htt_A5(), corpus.htt_phi5())):
        res = transfer(B, A, phi, cap, order)
        assert res.ok and cyl_curvature(res.triple).zero
        assert project_piB(res.triple) == B.brackets


def test_hom_complex_degrees():
    A = corpus.htt_A()
    H = hom_complex(A, A, 2, tag="A")
    # words (ha,ha), (ha,hc) times outputs ha, hc; (hc,hc) vanishes since hc is odd
    assert H.space.dim == 4
    assert H.space.degrees == (0, 1, -1, 0)
    assert H.space.names[0] == ("A", ("ha", "ha"), "ha")
