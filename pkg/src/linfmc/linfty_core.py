"""Filtered shifted L∞-algebras, ∞-morphisms and Maurer–Cartan elements.

Shifted convention throughout: ∂ and every bracket have degree +1, brackets
are graded symmetric, MC elements live in degree 0.  The filtration is the
weight grading of the basis; an algebra of depth ``N`` is the quotient
``L / F_N L`` (basis weights < N).  ``depth=None`` means unfiltered: weights
are ignored and sums are bounded by the arity cap alone.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from . import multilinear as ml
from .gradedlinalg import (
    ChainComplex,
    GradedMap,
    GradedSpace,
    Inconsistent,
    LinAlgError,
    frac,
    is_quasi_iso_on_filtration,
    is_surjective_on_filtration,
    nullspace,
    solve_linear,
)


class LInftyError(ValueError):
    pass


def _clean_table(table: dict) -> dict:
    out = {}
    for key, val in table.items():
        val = {o: c for o, c in val.items() if c}
        if val:
            out[tuple(key)] = val
    return out


class LInftyAlgebra:
    """A finite-dimensional (truncated) shifted L∞-algebra.

    ``differential`` maps a basis index to an element; ``brackets`` maps an
    arity m >= 2 to a table keyed by weakly increasing index tuples.
    """

    def __init__(self, space: GradedSpace, differential=None, brackets=None,
                 arity_cap: int = 2, depth: int | None = None, name: str = ""):
        self.space = space
        self.differential = {i: dict(v) for i, v in (differential or {}).items() if v}
        self.differential = {i: {o: frac(c) for o, c in v.items() if c}
                             for i, v in self.differential.items()}
        self.differential = {i: v for i, v in self.differential.items() if v}
        self.brackets = {}
        for m, table in (brackets or {}).items():
            t = _clean_table({k: {o: frac(c) for o, c in v.items()} for k, v in table.items()})
            if t:
                self.brackets[m] = t
        self.arity_cap = arity_cap
        self.depth = depth
        self.name = name
        self._validate()

    # -- construction helpers -----------------------------------------------
    @classmethod
    def build(cls, basis, differential=None, brackets=None, arity_cap=None,
              depth=None, name=""):
        """Build from names: ``differential={'x': {'y': 1}}``, ``brackets={('x','x'): {'y': 1}}``.

        Bracket keys may be given in any order; the Koszul sign of sorting is
        applied so that the stored value is the value on the sorted word.
        """
        space = GradedSpace.from_basis(basis)
        diff = {space.index(k): space.vector(v) for k, v in (differential or {}).items()}
        br = {}
        for args, val in (brackets or {}).items():
            idx = tuple(space.index(a) for a in args)
            key, sgn = ml.koszul_sort(idx, space.degrees)
            if not sgn:
                raise LInftyError(f"bracket on {args} vanishes by graded symmetry")
            vec = space.vector(val)
            br.setdefault(len(args), {})[key] = {o: sgn * c for o, c in vec.items()}
        if arity_cap is None:
            arity_cap = max(br, default=2)
        return cls(space, diff, br, arity_cap, depth, name)

    def _validate(self):
        sp = self.space
        if self.arity_cap < 1:
            raise LInftyError("arity cap must be >= 1")
        if self.depth is not None:
            if self.depth < 2:
                raise LInftyError("truncation depth must be >= 2")
            for n, w in zip(sp.names, sp.weights):
                if w >= self.depth:
                    raise LInftyError(f"{n!r} has weight {w} >= truncation depth {self.depth}")
        for i, out in self.differential.items():
            for o in out:
                if sp.degrees[o] != sp.degrees[i] + 1:
                    raise LInftyError(f"∂{sp.names[i]} -> {sp.names[o]} has wrong degree")
                if self.filtered and sp.weights[o] < sp.weights[i]:
                    raise LInftyError(f"∂{sp.names[i]} lowers the filtration weight")
        for m, table in self.brackets.items():
            if m < 2:
                raise LInftyError("bracket arities start at 2")
            if m > self.arity_cap:
                raise LInftyError(f"bracket of arity {m} exceeds arity cap {self.arity_cap}")
            for key, out in table.items():
                if len(key) != m or list(key) != sorted(key):
                    raise LInftyError(f"malformed bracket key {key}")
                _, sgn = ml.koszul_sort(key, sp.degrees)
                if not sgn:
                    raise LInftyError(f"bracket on {self.word_names(key)} must vanish (odd repeat)")
                deg = sum(sp.degrees[i] for i in key) + 1
                wt = sum(sp.weights[i] for i in key)
                for o in out:
                    if sp.degrees[o] != deg:
                        raise LInftyError(f"bracket {self.word_names(key)} -> {sp.names[o]} has wrong degree")
                    if self.filtered and sp.weights[o] < wt:
                        raise LInftyError(
                            f"bracket {self.word_names(key)} -> {sp.names[o]} violates weight additivity")

    @property
    def filtered(self) -> bool:
        return self.depth is not None

    @property
    def degs(self):
        return self.space.degrees

    def word_names(self, key) -> tuple:
        return tuple(self.space.names[i] for i in key)

    def structure(self, cut: int | None = None) -> ml.Structure:
        keep = None
        if cut is not None:
            keep = set(self.space.indices(max_weight=cut - 1))
        return ml.Structure(self.degs, self.differential, self.brackets, self.arity_cap, keep)

    def is_abelian(self) -> bool:
        return not self.brackets

    def __repr__(self):
        return f"LInftyAlgebra({self.name or '?'}, dim={self.space.dim}, depth={self.depth})"

    def __eq__(self, other):
        return (isinstance(other, LInftyAlgebra) and self.space == other.space
                and self.differential == other.differential and self.brackets == other.brackets
                and self.arity_cap == other.arity_cap and self.depth == other.depth)

    # -- linear data --------------------------------------------------------
    def chain_complex(self) -> ChainComplex:
        cols = {i: v for i, v in self.differential.items()}
        return ChainComplex(self.space, GradedMap.from_columns(self.space, self.space, 1, cols))

    def element(self, coeffs: dict) -> dict:
        return self.space.vector(coeffs)

    def named(self, x: dict) -> dict:
        return self.space.named(x)

    def d(self, x: dict) -> dict:
        return self.structure().ell(1, [x])

    def bracket(self, *xs) -> dict:
        return self.structure().ell(len(xs), list(xs))

    def max_word_length(self) -> int:
        n = 2 * self.arity_cap - 1
        if self.filtered:
            n = min(n, self.depth - 1)
        return max(n, 1)


# ---------------------------------------------------------------------------
# validation


@dataclass
class Violation:
    arity: int
    word: tuple
    residual: dict

    def __str__(self):
        res = ", ".join(f"{k}: {v}" for k, v in self.residual.items())
        return f"arity {self.arity} on ({', '.join(self.word)}): residual {{{res}}}"


@dataclass
class CheckReport:
    ok: bool
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def first(self):
        return self.violations[0] if self.violations else None

    def __bool__(self):
        return self.ok


def check_linfty(L: LInftyAlgebra, max_length: int | None = None, stop_at_first=False) -> CheckReport:
    """Expand Q² on every basis word that survives truncation and report residuals."""
    S = L.structure()
    sp = L.space
    top = max_length or L.max_word_length()
    maxw = L.depth - 1 if L.filtered else None
    report = CheckReport(True)
    for n in range(1, top + 1):
        for w in ml.words(range(sp.dim), n, sp.degrees, sp.weights, maxw):
            xs = [{i: Fraction(1)} for i in w]
            res = ml.linf_relation(S, xs, [sp.degrees[i] for i in w])
            report.checked += 1
            if res:
                report.ok = False
                report.violations.append(Violation(n, L.word_names(w), sp.named(res)))
                if stop_at_first:
                    return report
    return report


# ---------------------------------------------------------------------------
# Maurer–Cartan


def _require_degree(L, x, deg, what="element"):
    for i in x:
        if L.degs[i] != deg:
            raise LInftyError(f"{what} has a component {L.space.names[i]} of degree {L.degs[i]}, expected {deg}")


def curv(L: LInftyAlgebra, alpha: dict, cut: int | None = None) -> dict:
    """∂α + Σ_{m≥2} {α^m}_m / m!  (the linear term is ∂; brackets start at arity 2)."""
    _require_degree(L, alpha, 0)
    return L.structure(cut).curvature(alpha)


def is_mc(L: LInftyAlgebra, alpha: dict) -> bool:
    return not curv(L, alpha)


@dataclass
class MCElement:
    algebra: LInftyAlgebra
    value: dict

    def __post_init__(self):
        _require_degree(self.algebra, self.value, 0, "MC element")
        c = curv(self.algebra, self.value)
        if c:
            raise LInftyError(f"not Maurer–Cartan: curvature {self.algebra.named(c)}")


# ---------------------------------------------------------------------------
# twisting


def twist(L: LInftyAlgebra, alpha: dict) -> LInftyAlgebra:
    """L^α: ∂^α v = ∂v + Σ_k {α^k, v}/k!,  {v..}^α_m = Σ_k {α^k, v..}_{k+m}/k!."""
    if not is_mc(L, alpha):
        raise LInftyError("twisting requires a Maurer–Cartan element")
    S = L.structure()
    sp = L.space
    maxw = L.depth - 1 if L.filtered else None

    def twisted(args):
        out = S.ell(len(args), args) if len(args) > 1 else S.ell(1, args)
        for k in range(1, L.arity_cap - len(args) + 1):
            term = S.ell(k + len(args), [alpha] * k + args)
            out = ml.add(out, term, Fraction(1, factorial(k)))
        return out

    diff = {}
    for i in range(sp.dim):
        v = twisted([{i: Fraction(1)}])
        if v:
            diff[i] = v
    brackets = {}
    for m in range(2, L.arity_cap + 1):
        for w in ml.words(range(sp.dim), m, sp.degrees, sp.weights, maxw):
            v = twisted([{i: Fraction(1)} for i in w])
            if v:
                brackets.setdefault(m, {})[w] = v
    return LInftyAlgebra(sp, diff, brackets, L.arity_cap, L.depth, name=L.name + "^α")


# ---------------------------------------------------------------------------
# morphisms


class InftyMorphism:
    """∞-morphism given by its components Φ'_m : S^m(source) -> target."""

    def __init__(self, source: LInftyAlgebra, target: LInftyAlgebra, components: dict,
                 arity_cap: int | None = None, name: str = ""):
        self.source = source
        self.target = target
        self.components = {}
        for m, table in components.items():
            t = _clean_table({k: {o: frac(c) for o, c in v.items()} for k, v in table.items()})
            if t:
                self.components[m] = t
        self.arity_cap = arity_cap or max(self.components, default=1)
        self.name = name
        self._validate()

    @classmethod
    def build(cls, source, target, components: dict, arity_cap=None, name=""):
        """Components by name: ``{('x',): {'y': 1}, ('x', 'x'): {'z': 2}}``."""
        comps = {}
        for args, val in components.items():
            idx = tuple(source.space.index(a) for a in args)
            key, sgn = ml.koszul_sort(idx, source.degs)
            if not sgn:
                raise LInftyError(f"component on {args} vanishes by graded symmetry")
            vec = target.space.vector(val)
            comps.setdefault(len(args), {})[key] = {o: sgn * c for o, c in vec.items()}
        return cls(source, target, comps, arity_cap, name)

    @classmethod
    def strict(cls, source, target, linear: dict, name=""):
        """Strict morphism from a name -> {name: coeff} linear map."""
        return cls.build(source, target, {(k,): v for k, v in linear.items()}, 1, name)

    @classmethod
    def identity(cls, L):
        return cls(L, L, {1: {(i,): {i: Fraction(1)} for i in range(L.space.dim)}}, 1, "id")

    def _validate(self):
        S, T = self.source.space, self.target.space
        for m, table in self.components.items():
            if m < 1 or m > self.arity_cap:
                raise LInftyError(f"component arity {m} outside 1..{self.arity_cap}")
            for key, out in table.items():
                deg = sum(S.degrees[i] for i in key)
                wt = sum(S.weights[i] for i in key)
                for o in out:
                    if T.degrees[o] != deg:
                        raise LInftyError("morphism components must have degree 0")
                    if self.target.filtered and T.weights[o] < wt:
                        raise LInftyError(
                            f"component on {self.source.word_names(key)} -> {T.names[o]} "
                            "is not compatible with the filtrations")

    def data(self, cut: int | None = None) -> ml.MorphismData:
        keep = None
        if cut is not None:
            keep = set(self.target.space.indices(max_weight=cut - 1))
        return ml.MorphismData(self.components, self.source.degs, self.target.degs,
                               self.arity_cap, keep)

    def linear(self) -> GradedMap:
        cols = {k[0]: v for k, v in self.components.get(1, {}).items()}
        return GradedMap.from_columns(self.source.space, self.target.space, 0, cols)

    def is_strict(self) -> bool:
        return all(m == 1 for m in self.components)

    def __call__(self, *xs) -> dict:
        return self.data().apply(list(xs))

    def __eq__(self, other):
        return (isinstance(other, InftyMorphism) and self.source == other.source
                and self.target == other.target and self.components == other.components)

    def __repr__(self):
        return f"InftyMorphism({self.name or '?'}: {self.source.name} -> {self.target.name})"


def check_morphism(F: InftyMorphism, max_length: int | None = None, stop_at_first=False) -> CheckReport:
    S, T = F.source, F.target
    sp = S.space
    top = max_length
    if top is None:
        top = S.depth - 1 if S.filtered else max(F.arity_cap, S.arity_cap, T.arity_cap)
        if T.filtered:
            top = min(top, T.depth - 1)
        top = max(top, 1)
    maxw = None
    if S.filtered or T.filtered:
        maxw = min(x.depth - 1 for x in (S, T) if x.filtered)
    D = F.data()
    SS, TS = S.structure(), T.structure()
    report = CheckReport(True)
    for n in range(1, top + 1):
        for w in ml.words(range(sp.dim), n, sp.degrees, sp.weights, maxw):
            xs = [{i: Fraction(1)} for i in w]
            res = ml.morphism_relation(D, SS, TS, xs, [sp.degrees[i] for i in w])
            report.checked += 1
            if res:
                report.ok = False
                report.violations.append(Violation(n, S.word_names(w), T.named(res)))
                if stop_at_first:
                    return report
    return report


def pushforward(F: InftyMorphism, alpha: dict, check=True) -> dict:
    """Φ_*(α) = Σ_{m≥1} Φ'(α^m)/m!  (the linear term is included)."""
    if check and not is_mc(F.source, alpha):
        raise LInftyError("pushforward needs a Maurer–Cartan element")
    out = F.data().pushforward(alpha)
    if check and not is_mc(F.target, out):
        raise LInftyError("pushforward is not Maurer–Cartan; the morphism is broken")
    return out


def compose(G: InftyMorphism, F: InftyMorphism) -> InftyMorphism:
    """G ∘ F, computed by summing over set partitions of the input word."""
    if F.target is not G.source and F.target != G.source:
        raise LInftyError("cannot compose: target of the first is not the source of the second")
    S = F.source
    sp = S.space
    cap = F.arity_cap * G.arity_cap
    maxw = None
    if G.target.filtered:
        cap = min(cap, G.target.depth - 1)
        maxw = G.target.depth - 1
    Fd, Gd = F.data(), G.data()
    comps = {}
    for n in range(1, max(cap, 1) + 1):
        for w in ml.words(range(sp.dim), n, sp.degrees, sp.weights, maxw):
            v = ml.compose_relation(Gd, Fd, [{i: Fraction(1)} for i in w], [sp.degrees[i] for i in w])
            if v:
                comps.setdefault(n, {})[w] = v
    return InftyMorphism(S, G.target, comps, max(cap, 1), name=f"{G.name}∘{F.name}")


# ---------------------------------------------------------------------------
# classification and towers


@dataclass
class Classification:
    weak_equivalence: bool
    fibration: bool

    @property
    def acyclic_fibration(self) -> bool:
        return self.weak_equivalence and self.fibration


def classify_morphism(F: InftyMorphism) -> Classification:
    C, D = F.source.chain_complex(), F.target.chain_complex()
    phi = F.linear()
    try:
        we = is_quasi_iso_on_filtration(phi, C, D)
        fib = is_surjective_on_filtration(phi, C, D)
    except LinAlgError as exc:
        raise LInftyError(f"invalid morphism: {exc}") from None
    return Classification(we, fib)


def _sub_algebra(L: LInftyAlgebra, keep_idx: list, depth, name, drop_brackets=False):
    sp = L.space
    pos = {i: k for k, i in enumerate(keep_idx)}
    sub = GradedSpace(tuple(sp.names[i] for i in keep_idx), tuple(sp.degrees[i] for i in keep_idx),
                      tuple(sp.weights[i] for i in keep_idx))

    def remap(v):
        return {pos[o]: c for o, c in v.items() if o in pos}

    diff = {pos[i]: remap(v) for i, v in L.differential.items() if i in pos}
    brackets = {}
    if not drop_brackets:
        for m, table in L.brackets.items():
            for key, v in table.items():
                if all(i in pos for i in key):
                    r = remap(v)
                    if r:
                        brackets.setdefault(m, {})[tuple(pos[i] for i in key)] = r
    return LInftyAlgebra(sub, diff, brackets, L.arity_cap, depth, name)


def quotient(L: LInftyAlgebra, n: int) -> LInftyAlgebra:
    """L / F_n L: delete basis elements of weight >= n."""
    if n >= L.depth:
        return L
    keep = L.space.indices(max_weight=n - 1)
    return _sub_algebra(L, keep, n, f"{L.name}/F{n}")


def quotient_morphism(F: InftyMorphism, n: int) -> InftyMorphism:
    """Φ̄ : L/F_n -> L̃/F_n."""
    S, T = quotient(F.source, n), quotient(F.target, n)
    smap = {F.source.space.names[i]: i for i in range(F.source.space.dim)}
    comps = {}
    for m, table in F.components.items():
        for key, v in table.items():
            names = F.source.word_names(key)
            if not all(x in S.space._index for x in names):
                continue
            out = {T.space.index(F.target.space.names[o]): c for o, c in v.items()
                   if F.target.space.names[o] in T.space._index}
            if out:
                comps.setdefault(m, {})[tuple(S.space.index(x) for x in names)] = out
    del smap
    return InftyMorphism(S, T, comps, F.arity_cap, name=f"{F.name}/F{n}")


def quotient_tower(L: LInftyAlgebra, n: int):
    """(L/F_n, p_n : L/F_n -> L/F_{n-1}, i_{n-1} : F_{n-1}L/F_nL -> L/F_n)."""
    if not L.filtered:
        raise LInftyError("quotient tower needs a filtered algebra")
    if not 2 <= n <= L.depth:
        raise LInftyError(f"tower index {n} outside 2..{L.depth}")
    Q = quotient(L, n)
    P = quotient(L, n - 1) if n > 2 else _sub_algebra(L, [], 2, f"{L.name}/F1")
    p = InftyMorphism.strict(Q, P, {x: {x: 1} for x in P.space.names}, name=f"p{n}")
    kidx = [i for i in range(Q.space.dim) if Q.space.weights[i] == n - 1]
    K = _sub_algebra(Q, kidx, n, f"F{n-1}/F{n}", drop_brackets=True)
    inc = InftyMorphism.strict(K, Q, {x: {x: 1} for x in K.space.names}, name=f"i{n-1}")
    return Q, p, inc


# ---------------------------------------------------------------------------
# sampling


def weight_slices(L: LInftyAlgebra, degree: int) -> dict:
    out = {}
    for i in range(L.space.dim):
        if L.degs[i] == degree:
            out.setdefault(L.space.weights[i], []).append(i)
    return out


def sample_mc(L: LInftyAlgebra, rng: random.Random, bound: int = 5, tries: int = 200) -> dict:
    """Random MC element, solved weight by weight.

    At weight w the curvature component is linear in the weight-w unknowns:
    solve for one solution and add a random integer combination of the
    kernel.  Draws with a coefficient above ``bound`` are rejected.
    """
    if not L.filtered:
        raise LInftyError("stagewise MC sampling needs a filtered algebra")
    zero_slices = weight_slices(L, 0)
    one_slices = weight_slices(L, 1)
    for _ in range(tries):
        alpha = {}
        ok = True
        for w in range(1, L.depth):
            xs = zero_slices.get(w, [])
            ys = one_slices.get(w, [])
            c = curv(L, alpha)
            rhs = [-c.get(y, 0) for y in ys]
            rows = [{j: L.differential.get(x, {}).get(y, 0) for j, x in enumerate(xs)} for y in ys]
            rows = [{j: v for j, v in r.items() if v} for r in rows]
            if ys:
                sol = solve_linear(rows, rhs, ncols=len(xs))
                if isinstance(sol, Inconsistent):
                    ok = False
                    break
                x = list(sol.x)
            else:
                x = [Fraction(0)] * len(xs)
            for v in nullspace(rows, len(xs)):
                c0 = rng.randint(-bound, bound)
                for j, a in v.items():
                    x[j] += c0 * a
            for j, a in enumerate(x):
                if a:
                    alpha[xs[j]] = a
        if ok and all(abs(v) <= bound for v in alpha.values()) and is_mc(L, alpha):
            return alpha
    raise LInftyError(f"no MC element within bound {bound} after {tries} draws")
