"""Bundled example algebras, morphisms and transfer problems.

Every object here is validated by the test suite; the sign choices were
fixed by running ``check_linfty`` rather than by hand.
"""
from __future__ import annotations

from functools import lru_cache

from .gradedlinalg import ChainComplex, GradedMap, GradedSpace
from .linfty_core import InftyMorphism, LInftyAlgebra, compose, quotient_tower

_GAUGE_BASIS = [("g", -1, 1), ("x", 0, 1), ("u", 0, 2), ("y", 1, 2)]
_GAUGE_DIFF = {"g": {"x": 1}, "u": {"y": -1}}


def abelian() -> LInftyAlgebra:
    """Abelian, two weights: ∂a = b, ∂c = d, ∂e = f; h, k, m are cocycles."""
    return LInftyAlgebra.build(
        [("a", -1, 1), ("b", 0, 1), ("c", 0, 1), ("k", 0, 1), ("d", 1, 1),
         ("h", -1, 2), ("e", 0, 2), ("m", 0, 2), ("f", 1, 2)],
        differential={"a": {"b": 1}, "c": {"d": 1}, "e": {"f": 1}},
        depth=3, name="abelian")


def dgl_small() -> LInftyAlgebra:
    """The smallest non-abelian example: {x,x} = y; its only MC element is 0."""
    return LInftyAlgebra.build([("x", 0, 1), ("y", 1, 2)], brackets={("x", "x"): {"y": 1}},
                               depth=3, name="dgl_small")


def dgl2() -> LInftyAlgebra:
    """Two-term dg Lie algebra (degrees 0 and 1) with a rich MC set."""
    return LInftyAlgebra.build(
        [("x1", 0, 1), ("x2", 0, 1), ("z", 0, 2), ("y", 1, 2)],
        differential={"z": {"y": 1}},
        brackets={("x1", "x1"): {"y": 1}, ("x1", "x2"): {"y": 1}},
        depth=3, name="dgl2")


def gauge() -> LInftyAlgebra:
    """dg Lie algebra with a degree -1 gauge direction: ∂g = x, {g,x} = u."""
    return LInftyAlgebra.build(_GAUGE_BASIS, differential=_GAUGE_DIFF,
                               brackets={("x", "x"): {"y": 1}, ("g", "x"): {"u": 1}},
                               depth=3, name="gauge")


def linf3() -> LInftyAlgebra:
    """Three-term L∞-algebra (degrees -1, 0, 1) with a nonzero ternary bracket."""
    return LInftyAlgebra.build(
        [("g", -1, 1), ("x", 0, 1), ("v", 0, 2), ("z", 0, 2), ("q", 0, 3), ("y", 1, 2), ("w", 1, 3)],
        differential={"z": {"y": 1}, "q": {"w": 1}},
        brackets={("x", "x"): {"y": 1}, ("g", "x"): {"v": 1}, ("x", "x", "x"): {"w": 1}},
        depth=4, name="linf3")


def heis4() -> LInftyAlgebra:
    """Depth-4 filtered algebra: a filiform Lie algebra in degree -1 acting on a degree-0 copy."""
    return LInftyAlgebra.build(
        [("p", -1, 1), ("q", -1, 1), ("z", -1, 2), ("w", -1, 3),
         ("P", 0, 1), ("Q", 0, 1), ("Z", 0, 2), ("W", 0, 3)],
        differential={"p": {"P": 1}, "q": {"Q": 1}, "z": {"Z": 1}, "w": {"W": 1}},
        brackets={("p", "q"): {"z": 1}, ("p", "z"): {"w": 1}, ("p", "Q"): {"Z": 1}, ("p", "Z"): {"W": 1}},
        depth=4, name="heis4")


def fib_source() -> LInftyAlgebra:
    """``gauge`` plus an acyclic pair e -> f of weight 2."""
    return LInftyAlgebra.build(
        _GAUGE_BASIS + [("e", -1, 2), ("f", 0, 2)],
        differential={**_GAUGE_DIFF, "e": {"f": 1}},
        brackets={("x", "x"): {"y": 1}, ("g", "x"): {"u": 1}},
        depth=3, name="fib_source")


def fib_target() -> LInftyAlgebra:
    """The structure transported along ``fib_morphism`` (brackets doubled)."""
    return LInftyAlgebra.build(_GAUGE_BASIS, differential=_GAUGE_DIFF,
                               brackets={("x", "x"): {"y": 2}, ("g", "x"): {"u": 2}},
                               depth=3, name="fib_target")


def fib_morphism() -> InftyMorphism:
    """Non-strict acyclic fibration: projection plus Φ'(x,x) = u."""
    comps = {(n,): {n: 1} for n in ("g", "x", "u", "y")}
    comps[("x", "x")] = {"u": 1}
    return InftyMorphism.build(fib_source(), fib_target(), comps, name="fib")


def abelianization() -> InftyMorphism:
    """gauge -> gauge/F_2, a strict acyclic fibration (the weight-2 part u -> y is acyclic)."""
    _, p, _ = quotient_tower(gauge(), 3)
    p.name = "abelianization"
    return p


# ---------------------------------------------------------------------------
# transfer data


def htt_B() -> LInftyAlgebra:
    """Four-dimensional dg Lie algebra: ∂b1 = b2, {a,a} = c + b2, {a,b1} = c.

    H(B) = span(a, c) and the induced bracket on cohomology is {a,a} = c.
    """
    return LInftyAlgebra.build(
        [("a", 0, 1), ("b1", 0, 2), ("b2", 1, 2), ("c", 1, 3)],
        differential={"b1": {"b2": 1}},
        brackets={("a", "a"): {"c": 1, "b2": 1}, ("a", "b1"): {"c": 1}},
        depth=4, name="htt_B")


def htt_A() -> ChainComplex:
    """H(B) with zero differential."""
    return ChainComplex.zero(GradedSpace.from_basis([("ha", 0, 1), ("hc", 1, 3)]))


def htt_phi() -> GradedMap:
    """Cocycle section ha -> a, hc -> c."""
    B = htt_B()
    A = htt_A()
    return GradedMap.from_columns(A.space, B.space, 0, {
        A.space.index("ha"): {B.space.index("a"): 1},
        A.space.index("hc"): {B.space.index("c"): 1},
    })


def htt_B5() -> LInftyAlgebra:
    """``htt_B`` with a second primitive b1' of b2, so stage solves have genuine ties."""
    return LInftyAlgebra.build(
        [("a", 0, 1), ("b1", 0, 2), ("b1'", 0, 2), ("b2", 1, 2), ("c", 1, 3)],
        differential={"b1": {"b2": 1}, "b1'": {"b2": 1}},
        brackets={("a", "a"): {"c": 1, "b2": 1}, ("a", "b1"): {"c": 1}},
        depth=4, name="htt_B5")


def htt_A5() -> ChainComplex:
    return ChainComplex.zero(GradedSpace.from_basis([("ha", 0, 1), ("hk", 0, 2), ("hc", 1, 3)]))


def htt_phi5() -> GradedMap:
    """ha -> a, hk -> b1 - b1', hc -> c."""
    B = htt_B5()
    A = htt_A5()
    ix, jx = A.space.index, B.space.index
    return GradedMap.from_columns(A.space, B.space, 0, {
        ix("ha"): {jx("a"): 1},
        ix("hk"): {jx("b1"): 1, jx("b1'"): -1},
        ix("hc"): {jx("c"): 1},
    })


def htt_A_broken() -> ChainComplex:
    """Misses the class of c, so the section below is not a quasi-isomorphism."""
    return ChainComplex.zero(GradedSpace.from_basis([("ha", 0, 1)]))


def htt_phi_broken() -> GradedMap:
    B = htt_B()
    A = htt_A_broken()
    return GradedMap.from_columns(A.space, B.space, 0, {A.space.index("ha"): {B.space.index("a"): 1}})


# ---------------------------------------------------------------------------
# registries


ALGEBRAS = {
    "abelian": abelian,
    "dgl_small": dgl_small,
    "dgl2": dgl2,
    "gauge": gauge,
    "linf3": linf3,
    "heis4": heis4,
    "fib_source": fib_source,
    "fib_target": fib_target,
    "htt_B": htt_B,
    "htt_B5": htt_B5,
}


@lru_cache(maxsize=None)
def algebra(name: str) -> LInftyAlgebra:
    return ALGEBRAS[name]()


def morphisms() -> dict:
    """Named morphisms, including identities, tower projections and composites."""
    out = {}
    for name in ALGEBRAS:
        L = algebra(name)
        out[f"id_{name}"] = InftyMorphism.identity(L)
        if L.filtered:
            for n in range(2, L.depth + 1):
                _, p, i = quotient_tower(L, n)
                out[f"p{n}_{name}"] = p
                out[f"i{n - 1}_{name}"] = i
    fib = fib_morphism()
    out["fib"] = fib
    out["abelianization"] = abelianization()
    _, p, _ = quotient_tower(fib.target, fib.target.depth)
    out["fib_then_p2"] = compose(p, fib)
    return out
