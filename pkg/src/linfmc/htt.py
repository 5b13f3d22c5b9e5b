"""Homotopy transfer by arity-wise lifting.

A transfer problem is a shifted L∞-algebra B, a cochain complex A and a
quasi-isomorphism φ : A -> B.  A solution is a triple (Q_A, F, Q_B): brackets
on A, an ∞-morphism F : (A, Q_A) -> (B, Q_B) with linear term φ, and the
given brackets of B.  Such triples are the MC elements of the cylinder
algebra; we never build its brackets and instead read the MC equation as
"Q_A is L∞, Q_B is L∞, F is a morphism".

At arity m the equations are affine in (Q_A)_m and F_m, so each stage is one
exact linear solve.  The linear part is the mapping cone of
φ_* : Hom(S^m A, A) -> Hom(S^m A, B), acyclic exactly when φ is a
quasi-isomorphism; when a stage is inconsistent the left null vector of the
system is reported as the obstruction.

Edges between two solutions are built the same way with coefficients in
Ω_1: the unknowns are polynomial families in t (plus dt-components), pinned
to the two solutions at the endpoints.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

from . import multilinear as ml
from .sullivan_forms import PolyForm, eval_vertex
from .gradedlinalg import (
    ChainComplex,
    GradedMap,
    GradedSpace,
    Inconsistent,
    LinAlgError,
    _cone,
    is_quasi_iso_on_filtration,
    is_surjective_on_filtration,
    solve_linear,
)
from .linfty_core import (
    InftyMorphism,
    LInftyAlgebra,
    LInftyError,
    check_linfty,
    check_morphism,
)


class TransferError(ValueError):
    pass


def _unfiltered(B: LInftyAlgebra, cap: int) -> LInftyAlgebra:
    return LInftyAlgebra(B.space, B.differential, B.brackets, max(cap, B.arity_cap), None, B.name)


def _words(space: GradedSpace, m: int):
    return list(ml.words(range(space.dim), m, space.degrees))


def _wdeg(space, w) -> int:
    return sum(space.degrees[i] for i in w)


# ---------------------------------------------------------------------------
# triples


@dataclass
class CylTriple:
    """(Q_A, F, Q_B) with F's linear term pinned to φ.

    ``q``: arity -> {A word: A element}; ``f``: arity (>= 2) -> {A word: B element}.
    """
    A: ChainComplex
    B: LInftyAlgebra
    phi: GradedMap
    q: dict
    f: dict
    cap: int

    def linear_components(self) -> dict:
        return {(s,): dict(self.phi.column(s)) for s in range(self.A.space.dim) if self.phi.column(s)}

    def algebra_A(self) -> LInftyAlgebra:
        diff = {s: dict(self.A.differential.column(s)) for s in range(self.A.space.dim)}
        return LInftyAlgebra(self.A.space, diff, self.q, self.cap, None, "A")

    def algebra_B(self) -> LInftyAlgebra:
        return _unfiltered(self.B, self.cap)

    def morphism(self) -> InftyMorphism:
        comps = {1: self.linear_components(), **self.f}
        return InftyMorphism(self.algebra_A(), self.algebra_B(), comps, self.cap, "F")

    def named(self) -> dict:
        sa, sb = self.A.space, self.B.space

        def nm(table, out_space):
            return {m: {tuple(sa.names[i] for i in w): out_space.named(v) for w, v in sorted(t.items())}
                    for m, t in sorted(table.items())}
        return {"Q_A": nm(self.q, sa), "F": nm(self.f, sb)}

    def __eq__(self, other):
        return isinstance(other, CylTriple) and self.q == other.q and self.f == other.f


@dataclass
class CylCurvature:
    A: list
    F: list
    B: list

    @property
    def zero(self) -> bool:
        return not (self.A or self.F or self.B)


def cyl_curvature(t: CylTriple, phi: GradedMap | None = None) -> CylCurvature:
    """Residuals of the three component equations on all words up to the arity cap."""
    if phi is not None and phi.entries != t.phi.entries:
        raise TransferError("triple is pinned to a different φ")
    ra = check_linfty(t.algebra_A(), max_length=t.cap).violations
    rf = check_morphism(t.morphism(), max_length=t.cap).violations
    rb = check_linfty(t.algebra_B(), max_length=t.cap).violations
    return CylCurvature(ra, rf, rb)


def project_piB(t: CylTriple) -> dict:
    """π_B: the brackets of B carried by the triple."""
    return t.B.brackets


def trivial_triple(A, B, phi, cap) -> CylTriple:
    """(0, φ, 0)-shaped starting point: no higher brackets on A, F strict."""
    return CylTriple(A, B, phi, {}, {}, cap)


# ---------------------------------------------------------------------------
# stagewise solving


@dataclass
class Obstruction:
    arity: int
    equations: list           # (kind, word names, output name) with nonzero weight in the certificate
    certificate: list         # left null vector y with y·A = 0
    value: Fraction           # y·b != 0
    degree: int | None = None

    def __str__(self):
        return (f"obstruction at arity {self.arity}"
                + (f", degree {self.degree}" if self.degree is not None else "")
                + f": certificate value {self.value} on {len(self.equations)} equations")


@dataclass
class TransferResult:
    ok: bool
    triple: CylTriple | None = None
    obstruction: Obstruction | None = None
    stages: list = field(default_factory=list)
    quasi_iso: bool | None = None


def _stage_residuals(t: CylTriple, m: int) -> dict:
    """Residuals of the A- and F-equations on words of length m, keyed by equation."""
    sa = t.A.space
    SA = t.algebra_A().structure()
    FB = t.algebra_B()
    FD = t.morphism().data()
    SB = FB.structure()
    out = {}
    for w in _words(sa, m):
        xs = [{i: Fraction(1)} for i in w]
        xd = [sa.degrees[i] for i in w]
        for o, c in ml.linf_relation(SA, xs, xd).items():
            out[("A", w, o)] = c
        for o, c in ml.morphism_relation(FD, SA, SB, xs, xd).items():
            out[("F", w, o)] = c
    return out


def _stage_unknowns(A: GradedSpace, B: GradedSpace, m: int) -> list:
    out = []
    for w in _words(A, m):
        d = _wdeg(A, w)
        out += [("q", w, o) for o in range(A.dim) if A.degrees[o] == d + 1]
        out += [("f", w, o) for o in range(B.dim) if B.degrees[o] == d]
    return out


def _with(t: CylTriple, m: int, kind: str, w, o, c) -> CylTriple:
    q = {k: dict(v) for k, v in t.q.items()}
    f = {k: dict(v) for k, v in t.f.items()}
    table = (q if kind == "q" else f).setdefault(m, {})
    table[w] = ml.add(table.get(w, {}), {o: c})
    return CylTriple(t.A, t.B, t.phi, {k: v for k, v in q.items() if v},
                     {k: v for k, v in f.items() if v}, t.cap)


def _eq_name(t: CylTriple, key) -> tuple:
    kind, w, o = key
    out_space = t.A.space if kind == "A" else t.B.space
    return (kind, tuple(t.A.space.names[i] for i in w), out_space.names[o])


def transfer(B: LInftyAlgebra, A: ChainComplex, phi: GradedMap, arity_cap: int = 4,
             pivot_order: str = "lex") -> TransferResult:
    """Transfer the structure of B along φ, one arity at a time."""
    if phi.source != A.space or phi.target != B.space or phi.degree != 0:
        raise TransferError("φ must be a degree 0 map A -> B")
    if not check_linfty(_unfiltered(B, arity_cap), max_length=arity_cap).ok:
        raise TransferError("B is not an L∞-algebra")
    Bc = B.chain_complex()
    try:
        qi = is_quasi_iso_on_filtration(phi, A, Bc)
    except LinAlgError:
        qi = False
    t = trivial_triple(A, B, phi, arity_cap)
    r1 = check_morphism(t.morphism(), max_length=1)
    if not r1.ok:
        raise TransferError(f"φ is not a chain map: {r1.first}")
    stages = []
    for m in range(2, arity_cap + 1):
        r0 = _stage_residuals(t, m)
        unknowns = _stage_unknowns(A.space, B.space, m)
        cols = []
        for kind, w, o in unknowns:
            r = _stage_residuals(_with(t, m, kind, w, o, 1), m)
            cols.append(ml.add(r, r0, -1))
        keys = sorted(set(r0).union(*[set(c) for c in cols]))
        kpos = {k: i for i, k in enumerate(keys)}
        rows = [dict() for _ in keys]
        for j, col in enumerate(cols):
            for k, v in col.items():
                rows[kpos[k]][j] = v
        rhs = [-r0.get(k, 0) for k in keys]
        sol = solve_linear(rows, rhs, ncols=len(unknowns), pivot_order=pivot_order)
        if isinstance(sol, Inconsistent):
            eqs = [_eq_name(t, keys[i]) for i, y in enumerate(sol.y) if y]
            degs = {_wdeg(A.space, keys[i][1]) for i, y in enumerate(sol.y) if y}
            ob = Obstruction(m, eqs, sol.y, sol.value, degs.pop() if len(degs) == 1 else None)
            return TransferResult(False, t, ob, stages, qi)
        for (kind, w, o), c in zip(unknowns, sol.x):
            if c:
                t = _with(t, m, kind, w, o, c)
        if _stage_residuals(t, m):  # pragma: no cover - exact solve
            raise TransferError(f"stage {m} residual did not vanish")
        stages.append({"arity": m, "unknowns": len(unknowns), "equations": len(keys)})
    cert = cyl_curvature(t)
    if not cert.zero:  # pragma: no cover
        raise TransferError("transferred triple is not Maurer–Cartan")
    return TransferResult(True, t, None, stages, qi)


# ---------------------------------------------------------------------------
# convolution complexes and the classification of π_B


def _sym_diff(X: ChainComplex, m: int):
    """Induced differential on S^m X: basis = words, d(x1..xm) = Σ ± x1..dxi..xm."""
    sp = X.space
    words = _words(sp, m)
    pos = {w: k for k, w in enumerate(words)}
    cols = {}
    for k, w in enumerate(words):
        out = {}
        pre = 0
        for a, i in enumerate(w):
            sgn = -1 if pre % 2 else 1
            for o, c in X.differential.column(i).items():
                key, s2 = ml.koszul_sort(w[:a] + (o,) + w[a + 1:], sp.degrees)
                if s2:
                    ml.acc(out, pos[key], sgn * s2 * c)
            pre += sp.degrees[i]
        cols[k] = out
    return words, cols


def hom_complex(X: ChainComplex, Y: ChainComplex, m: int, weight: int | None = None,
                tag: str = "") -> ChainComplex:
    """Hom(S^m X, Y) with δf = d_Y f - (-1)^|f| f d_S; basis (tag, word, output)."""
    words, dS = _sym_diff(X, m)
    wt = weight if weight is not None else m
    basis = []
    for w in words:
        for o in range(Y.space.dim):
            basis.append((w, o))
    names = tuple((tag, tuple(X.space.names[i] for i in w), Y.space.names[o]) for w, o in basis)
    degs = tuple(Y.space.degrees[o] - _wdeg(X.space, w) for w, o in basis)
    sp = GradedSpace(names, degs, tuple([wt] * len(basis)))
    bpos = {b: k for k, b in enumerate(basis)}
    wpos = {w: k for k, w in enumerate(words)}
    entries = {}
    for k, (w, o) in enumerate(basis):
        fdeg = degs[k]
        for o2, c in Y.differential.column(o).items():
            ml.acc(entries, (bpos[(w, o2)], k), c)
        # (f∘d_S)(v) has a w-component whenever d_S v hits w
        for v, col in dS.items():
            c = col.get(wpos[w])
            if c:
                ml.acc(entries, (bpos[(words[v], o)], k), -(-1) ** (fdeg % 2) * c)
    return ChainComplex(sp, GradedMap(sp, sp, 1, entries))


def _stack(parts: list) -> ChainComplex:
    names, degs, wts, entries = [], [], [], {}
    off = 0
    for C in parts:
        names += C.space.names
        degs += C.space.degrees
        wts += C.space.weights
        for (t, s), c in C.differential.entries.items():
            entries[(off + t, off + s)] = c
        off += C.space.dim
    sp = GradedSpace(tuple(names), tuple(degs), tuple(wts))
    return ChainComplex(sp, GradedMap(sp, sp, 1, entries))


class ConvAlgebra:
    """Maps S^m(A) -> A, 1 <= m <= cap, weighted by arity.

    Its MC elements are the L∞-structures on A up to the cap; membership is
    decided by ``check_linfty`` on the corresponding algebra.
    """

    def __init__(self, A: ChainComplex, arity_cap: int):
        self.A = A
        self.cap = arity_cap

    def complex(self) -> ChainComplex:
        return _stack([hom_complex(self.A, self.A, m, tag="A") for m in range(1, self.cap + 1)])

    def is_mc(self, brackets: dict) -> bool:
        diff = {s: dict(self.A.differential.column(s)) for s in range(self.A.space.dim)}
        L = LInftyAlgebra(self.A.space, diff, brackets, self.cap, None)
        return check_linfty(L, max_length=self.cap).ok


def _compose_map(Hsrc: ChainComplex, Htgt: ChainComplex, fn) -> dict:
    """Entries of a degree-0 map between Hom complexes from a basis function."""
    tpos = {n: k for k, n in enumerate(Htgt.space.names)}
    out = {}
    for k, n in enumerate(Hsrc.space.names):
        for tn, c in fn(n).items():
            ml.acc(out, (tpos[tn], k), c)
    return out


def cylinder_complexes(A: ChainComplex, B: LInftyAlgebra, phi: GradedMap, arity_cap: int):
    """Linear part of the cylinder at (0, φ, 0), arity by arity.

    Returns (Cyl, Hom_B, π_B) where Cyl is the cone of
    Ψ(f, h) = φ∘f - h∘φ^{⊗m} on Hom(S^m A, A) ⊕ Hom(S^m B, B) -> Hom(S^m A, B)
    and π_B projects onto the Hom(S^m B, B) summand.
    """
    Bc = B.chain_complex()
    cyl_parts, hb_parts, src_parts = [], [], []
    psi_entries = {}
    for m in range(1, arity_cap + 1):
        HA = hom_complex(A, A, m, tag="A")
        HB = hom_complex(Bc, Bc, m, tag="B")
        HF = hom_complex(A, Bc, m, tag="F")
        src = _stack([HA, HB])

        def psi(name, m=m):
            tag, w, o = name
            out = {}
            if tag == "A":
                for b, c in phi.column(A.space.index(o)).items():
                    ml.acc(out, ("F", w, B.space.names[b]), c)
            else:
                # h∘φ^{⊗m}: expand each A word through φ and collect the B words
                bw = tuple(B.space.index(x) for x in w)
                for aw in _words(A.space, m):
                    val = ml.eval_table({bw: {0: Fraction(1)}},
                                        [dict(phi.column(i)) for i in aw], B.space.degrees)
                    c = val.get(0)
                    if c:
                        ml.acc(out, ("F", tuple(A.space.names[i] for i in aw), o), -c)
            return out
        ent = _compose_map(src, HF, psi)
        cone = _cone(GradedMap(src.space, HF.space, 0, ent), src, HF)
        cyl_parts.append(cone)
        hb_parts.append(HB)
        src_parts.append((src, HA.space.dim, HB.space.dim, HF.space.dim))
    Cyl = _stack(cyl_parts)
    HBall = _stack(hb_parts)
    # π_B: cone basis ("c", (B, w, o)) -> Hom_B basis (B, w, o), with the cone's degree shift undone
    hpos = {n: k for k, n in enumerate(HBall.space.names)}
    ent = {}
    for k, n in enumerate(Cyl.space.names):
        if n[0] == "c" and n[1][0] == "B":
            ent[(hpos[n[1]], k)] = Fraction(1)
    shifted = GradedSpace(HBall.space.names, tuple(d - 1 for d in HBall.space.degrees), HBall.space.weights)
    HBs = ChainComplex(shifted, GradedMap(shifted, shifted, 1, {k: -v for k, v in HBall.differential.entries.items()}))
    piB = GradedMap(Cyl.space, HBs.space, 0, ent)
    return Cyl, HBs, piB


@dataclass
class PiBClassification:
    strict: bool
    weak_equivalence: bool
    fibration: bool

    @property
    def acyclic_fibration(self):
        return self.weak_equivalence and self.fibration


def classify_piB(A: ChainComplex, B: LInftyAlgebra, phi: GradedMap, arity_cap: int) -> PiBClassification:
    Cyl, HB, piB = cylinder_complexes(A, B, phi, arity_cap)
    return PiBClassification(True, is_quasi_iso_on_filtration(piB, Cyl, HB),
                             is_surjective_on_filtration(piB, Cyl, HB))


# ---------------------------------------------------------------------------
# connecting two solutions


def _formify(table: dict, n: int = 1) -> dict:
    return {m: {w: {o: PolyForm.const(n, c) for o, c in v.items()} for w, v in t.items()}
            for m, t in table.items()}


@dataclass
class FormTriple:
    """A triple with Ω_1-valued components: a 1-simplex of the cylinder's MC set."""
    base: CylTriple
    q: dict
    f: dict

    def algebra_A(self) -> LInftyAlgebra:
        b = self.base
        diff = {s: {o: PolyForm.const(1, c) for o, c in b.A.differential.column(s).items()}
                for s in range(b.A.space.dim)}
        L = LInftyAlgebra.__new__(LInftyAlgebra)
        L.space, L.differential, L.brackets = b.A.space, {k: v for k, v in diff.items() if v}, self.q
        L.arity_cap, L.depth, L.name = b.cap, None, "A⊗Ω1"
        return L

    def algebra_B(self) -> LInftyAlgebra:
        B = self.base.algebra_B()
        L = LInftyAlgebra.__new__(LInftyAlgebra)
        L.space = B.space
        L.differential = {i: {o: PolyForm.const(1, c) for o, c in v.items()} for i, v in B.differential.items()}
        L.brackets = _formify(B.brackets)
        L.arity_cap, L.depth, L.name = B.arity_cap, None, "B⊗Ω1"
        return L

    def f_components(self) -> dict:
        lin = {k: {o: PolyForm.const(1, c) for o, c in v.items()}
               for k, v in self.base.linear_components().items()}
        return {1: lin, **self.f}

    def residuals(self, m: int | None = None) -> dict:
        """Ω_1-valued residuals of the A- and F-equations (all lengths <= cap, or length m)."""
        b = self.base
        sa = b.A.space
        SA = self.algebra_A().structure()
        SB = self.algebra_B().structure()
        FD = ml.MorphismData(self.f_components(), sa.degrees, b.B.space.degrees, b.cap)
        out = {}
        lengths = [m] if m is not None else range(1, b.cap + 1)
        one = PolyForm.const(1)
        for n in lengths:
            for w in _words(sa, n):
                xs = [{i: one} for i in w]
                xd = [sa.degrees[i] for i in w]
                for o, c in ml.linf_relation(SA, xs, xd).items():
                    out[("A", w, o)] = c
                for o, c in ml.morphism_relation(FD, SA, SB, xs, xd).items():
                    out[("F", w, o)] = c
        return out

    def endpoint(self, v: int) -> CylTriple:
        def ev(table):
            out = {}
            for m, t in table.items():
                for w, val in t.items():
                    e = {o: eval_vertex(c, v) for o, c in val.items() if eval_vertex(c, v)}
                    if e:
                        out.setdefault(m, {})[w] = e
            return out
        b = self.base
        return CylTriple(b.A, b.B, b.phi, ev(self.q), ev(self.f), b.cap)

    def is_degenerate(self) -> bool:
        return all(c.poly_degree() == 0 and c.degree == 0
                   for table in (self.q, self.f) for t in table.values()
                   for val in t.values() for c in val.values())


@dataclass
class ConnectResult:
    ok: bool
    edge: FormTriple | None = None
    arity: int | None = None
    message: str = ""
    residual_count: int = 0


def _interp(t0: dict, t1: dict, m: int) -> dict:
    one = PolyForm.const(1)
    t = PolyForm.t(1, 1)
    out = {}
    for w in set(t0.get(m, {})) | set(t1.get(m, {})):
        a, b = t0.get(m, {}).get(w, {}), t1.get(m, {}).get(w, {})
        val = {}
        for o in set(a) | set(b):
            c = (one - t) * a.get(o, 0) + t * b.get(o, 0)
            if c:
                val[o] = c
        if val:
            out[w] = val
    return out


def _form_unknowns(A: GradedSpace, B: GradedSpace, m: int, D: int) -> list:
    """(kind, word, output, form) for the arity-m families: t(1-t)t^p in the form-degree
    0 slot, t^p dt in the form-degree 1 slot."""
    t = PolyForm.t(1, 1)
    bump = t * (PolyForm.const(1) - t)
    dt = PolyForm.dt(1, 1)
    mons = [PolyForm(1, {((p,), ()): 1}) for p in range(D + 1)]
    out = []
    for w in _words(A, m):
        d = _wdeg(A, w)
        for o in range(A.dim):
            if A.degrees[o] == d + 1:
                out += [("q", w, o, bump * x) for x in mons]
            elif A.degrees[o] == d:
                out += [("q", w, o, x * dt) for x in mons]
        for o in range(B.dim):
            if B.degrees[o] == d:
                out += [("f", w, o, bump * x) for x in mons]
            elif B.degrees[o] == d - 1:
                out += [("f", w, o, x * dt) for x in mons]
    return out


def _ft_with(ft: FormTriple, m: int, kind: str, w, o, c) -> FormTriple:
    q = {k: {ww: dict(v) for ww, v in t.items()} for k, t in ft.q.items()}
    f = {k: {ww: dict(v) for ww, v in t.items()} for k, t in ft.f.items()}
    table = (q if kind == "q" else f).setdefault(m, {})
    table[w] = ml.add(table.get(w, {}), {o: c})
    return FormTriple(ft.base, q, f)


def connect_solutions(t0: CylTriple, t1: CylTriple, arity_cap: int | None = None,
                      max_poly_degree: int = 6, pivot_order: str = "lex") -> ConnectResult:
    """A 1-simplex in the fiber over Q_B with vertex 0 at t0 and vertex 1 at t1."""
    cap = arity_cap or t0.cap
    if t0.B is not t1.B and (t0.B.brackets != t1.B.brackets or t0.B.differential != t1.B.differential):
        raise TransferError("solutions lie over different structures on B")
    if t0.phi.entries != t1.phi.entries or t0.A.space != t1.A.space:
        raise TransferError("solutions transfer along different maps")
    for t in (t0, t1):
        if not cyl_curvature(t).zero:
            raise TransferError("input triple is not a solution")
    base = CylTriple(t0.A, t0.B, t0.phi, {}, {}, cap)
    ft = FormTriple(base, {}, {})
    total = 0
    for m in range(2, cap + 1):
        interp_q, interp_f = _interp(t0.q, t1.q, m), _interp(t0.f, t1.f, m)
        cur = FormTriple(base, {**ft.q, **({m: interp_q} if interp_q else {})},
                         {**ft.f, **({m: interp_f} if interp_f else {})})
        r0 = cur.residuals(m)
        if not r0:
            ft = cur
            continue
        start = max(c.poly_degree() for c in r0.values())
        sol = None
        for D in range(max(start, 1), max(start, max_poly_degree) + 1):
            unknowns = _form_unknowns(t0.A.space, t0.B.space, m, D)
            cols = [ml.add(_ft_with(cur, m, k, w, o, form).residuals(m), r0, -1)
                    for k, w, o, form in unknowns]
            keys = {}
            for x in [r0] + cols:
                for key, c in x.items():
                    for term in c.terms:
                        keys.setdefault((key, term), len(keys))
            rows = [dict() for _ in keys]
            for j, col in enumerate(cols):
                for key, c in col.items():
                    for term, v in c.terms.items():
                        rows[keys[(key, term)]][j] = v
            rhs = [0] * len(keys)
            for key, c in r0.items():
                for term, v in c.terms.items():
                    rhs[keys[(key, term)]] = -v
            sol = solve_linear(rows, rhs, ncols=len(unknowns), pivot_order=pivot_order)
            if not isinstance(sol, Inconsistent):
                break
        if sol is None or isinstance(sol, Inconsistent):
            return ConnectResult(False, None, m, f"no edge at arity {m} with polynomial degree <= "
                                                 f"{max(start, max_poly_degree)}")
        for (k, w, o, form), c in zip(unknowns, sol.x):
            if c:
                cur = _ft_with(cur, m, k, w, o, form * c)
        if cur.residuals(m):  # pragma: no cover
            raise TransferError(f"edge stage {m} did not close")
        ft = cur
    res = ft.residuals()
    total = len(res)
    if res:  # pragma: no cover
        raise TransferError("edge is not Maurer–Cartan")
    if ft.endpoint(0) != t0 or ft.endpoint(1) != t1:
        raise TransferError("edge endpoints do not match the given solutions")
    return ConnectResult(True, ft, None, "", total)
