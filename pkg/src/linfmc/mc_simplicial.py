"""Simplices of the Maurer–Cartan simplicial set, horn filling and fibration lifting.

An n-simplex of a truncated algebra L is a degree-0 element of L ⊗ Ω_n with
vanishing curvature, stored as ``{basis index: PolyForm}``.  Horn filling and
lifting run up the weight tower L/F_2 <- L/F_3 <- ... <- L/F_N: at each step
the new weight slice is an abelian kernel, where everything is linear and the
dilation homotopy centered at the horn vertex does the work.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import multilinear as ml
from .sullivan_forms import PolyForm, dilation_homotopy, eval_vertex, random_form
from .gradedlinalg import Inconsistent, solve_linear
from .linfty_core import (
    InftyMorphism,
    LInftyAlgebra,
    LInftyError,
    classify_morphism,
    sample_mc,
)


class SimplicialError(ValueError):
    pass


class LiftError(SimplicialError):
    """A lifting problem is infeasible; ``weight`` and ``degree`` locate the failure."""

    def __init__(self, msg, weight=None, degree=None):
        super().__init__(msg)
        self.weight = weight
        self.degree = degree


# ---------------------------------------------------------------------------
# elements of L ⊗ Ω_n


def depth_of(L: LInftyAlgebra) -> int:
    return L.depth if L.filtered else L.space.max_weight() + 1


def const_elem(x: dict, n: int) -> dict:
    return {i: PolyForm.const(n, c) for i, c in x.items() if c}


def emap(x: dict, f) -> dict:
    out = {}
    for i, c in x.items():
        v = f(c)
        if v:
            out[i] = v
    return out


def esub(x: dict, y: dict) -> dict:
    return ml.add(x, y, -1)


def eface(x: dict, i: int) -> dict:
    return emap(x, lambda c: c.face(i))


def edegen(x: dict, j: int) -> dict:
    return emap(x, lambda c: c.degeneracy(j))


def eval_at(x: dict, v: int) -> dict:
    return {i: a for i, c in x.items() if (a := eval_vertex(c, v))}


def restrict(L: LInftyAlgebra, x: dict, below: int) -> dict:
    """Image in L/F_below."""
    w = L.space.weights
    return {i: c for i, c in x.items() if w[i] < below}


def weight_part(L: LInftyAlgebra, x: dict, wt: int) -> dict:
    w = L.space.weights
    return {i: c for i, c in x.items() if w[i] == wt}


def check_total_degree(L: LInftyAlgebra, x: dict, n: int, total: int = 0):
    for i, c in x.items():
        if not isinstance(c, PolyForm) or c.n != n:
            raise SimplicialError(f"coefficient of {L.space.names[i]} is not a form on Δ^{n}")
        for k, _ in c.homogeneous_parts():
            if L.degs[i] + k != total:
                raise SimplicialError(
                    f"component {L.space.names[i]} has total degree {L.degs[i] + k}, expected {total}")


def tcurv(L: LInftyAlgebra, x: dict, cut: int | None = None) -> dict:
    """Curvature in (L/F_cut) ⊗ Ω_n."""
    return L.structure(cut).curvature(x)


def tdiff(L: LInftyAlgebra, x: dict, cut: int | None = None) -> dict:
    """∂ ⊗ 1 + 1 ⊗ d (with the Koszul sign on the form leg)."""
    return L.structure(cut).ell(1, [x])


def partial(L: LInftyAlgebra, x: dict, cut: int | None = None) -> dict:
    """∂ ⊗ 1 alone; form coefficients sit on the right so no sign is needed."""
    keep = None if cut is None else set(L.space.indices(max_weight=cut - 1))
    out = {}
    for i, c in x.items():
        for o, v in L.differential.get(i, {}).items():
            if keep is None or o in keep:
                ml.acc(out, o, c * v)
    return out


def homotopy(L: LInftyAlgebra, x: dict, v: int) -> dict:
    """1 ⊗ h_v with the Koszul sign (-1)^|e|."""
    out = {}
    for i, c in x.items():
        hc = dilation_homotopy(c, v)
        if hc:
            out[i] = -hc if L.degs[i] % 2 else hc
    return out


def contract(L: LInftyAlgebra, x: dict, v: int, cut: int | None = None) -> dict:
    """Perturbed homotopy Σ_j H(-∂H)^j for D = ∂ ⊗ 1 + 1 ⊗ d.

    On D-closed elements with ev_v = 0 it returns a primitive:
    D(contract(c)) = c.  The series stops because ∂H lowers form degree.
    """
    total = {}
    y = homotopy(L, x, v)
    while y:
        total = ml.add(total, y)
        y = ml.scale(homotopy(L, partial(L, y, cut), v), -1)
    return total


def tensor_algebra(L: LInftyAlgebra, n: int, cut: int | None = None) -> ml.Structure:
    """Structure maps of L ⊗ Ω_n (brackets extended with the form legs multiplied)."""
    return L.structure(cut)


# ---------------------------------------------------------------------------
# simplices and horns


@dataclass
class Simplex:
    algebra: LInftyAlgebra
    n: int
    value: dict
    verify: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.value = {i: c for i, c in self.value.items() if c}
        check_total_degree(self.algebra, self.value, self.n)
        if self.verify:
            c = tcurv(self.algebra, self.value)
            if c:
                raise SimplicialError("not a Maurer–Cartan simplex: nonzero curvature")

    @classmethod
    def vertex(cls, L, alpha: dict):
        return cls(L, 0, const_elem(alpha, 0))

    def face(self, i: int) -> "Simplex":
        if self.n == 0 or not 0 <= i <= self.n:
            raise SimplicialError(f"face index {i} out of range for a {self.n}-simplex")
        return Simplex(self.algebra, self.n - 1, eface(self.value, i), verify=False)

    def degeneracy(self, j: int) -> "Simplex":
        if not 0 <= j <= self.n:
            raise SimplicialError(f"degeneracy index {j} out of range for a {self.n}-simplex")
        return Simplex(self.algebra, self.n + 1, edegen(self.value, j), verify=False)

    def vertex_value(self, v: int) -> dict:
        return eval_at(self.value, v)

    def named(self) -> dict:
        return {self.algebra.space.names[i]: str(c) for i, c in sorted(self.value.items())}

    def __eq__(self, other):
        return (isinstance(other, Simplex) and self.n == other.n
                and self.value == other.value and self.algebra == other.algebra)


def face_simplex(s: Simplex, i: int) -> Simplex:
    return s.face(i)


def degenerate_simplex(s: Simplex, j: int) -> Simplex:
    return s.degeneracy(j)


@dataclass
class HornData:
    m: int
    k: int
    faces: dict  # i -> Simplex of dimension m-1, for i != k

    def __post_init__(self):
        if self.m < 1 or not 0 <= self.k <= self.m:
            raise SimplicialError(f"no horn Λ^{self.m}_{self.k}")
        want = set(range(self.m + 1)) - {self.k}
        if set(self.faces) != want:
            raise SimplicialError(f"horn Λ^{self.m}_{self.k} needs faces {sorted(want)}")
        for i, s in self.faces.items():
            if s.n != self.m - 1:
                raise SimplicialError(f"face {i} has dimension {s.n}, expected {self.m - 1}")
        for i in want:
            for j in want:
                if i < j and eface(self.faces[j].value, i) != eface(self.faces[i].value, j - 1):
                    raise SimplicialError(f"horn faces {i} and {j} are not compatible")

    @classmethod
    def of(cls, s: Simplex, k: int) -> "HornData":
        return cls(s.n, k, {i: s.face(i) for i in range(s.n + 1) if i != k})

    @property
    def algebra(self):
        return next(iter(self.faces.values())).algebra

    def values(self) -> dict:
        return {i: s.value for i, s in self.faces.items()}


def moore_fill(faces: dict, m: int, k: int) -> dict:
    """Filler of a horn in a simplicial vector space, by correcting with degeneracies."""
    w = {}
    for i in range(k):
        w = ml.add(w, edegen(esub(faces[i], eface(w, i)), i))
    for i in range(m, k, -1):
        w = ml.add(w, edegen(esub(faces[i], eface(w, i)), i - 1))
    return w


def fill_horn_abelian(K: LInftyAlgebra, h: HornData) -> Simplex:
    """Horn filling when all brackets vanish: MC simplices are the D-cocycles."""
    if not K.is_abelian():
        raise SimplicialError("fill_horn_abelian needs an abelian algebra")
    w = moore_fill(h.values(), h.m, h.k)
    out = Simplex(K, h.m, w)
    for i, s in h.faces.items():
        if out.face(i).value != s.value:  # pragma: no cover - guarded by the algorithm
            raise SimplicialError("Moore filler does not match the horn")
    return out


# ---------------------------------------------------------------------------
# the tower step


@dataclass
class StepRecord:
    """What happened at one level of the tower (kept for certificates)."""
    weight: int
    eta_zero: bool
    eta_closed: bool
    eta_vanishes_on_horn: bool
    lambda_zero: bool


def _assert_vanish_on_horn(x: dict, m: int, k: int, what: str):
    for i in range(m + 1):
        if i != k and eface(x, i):
            raise SimplicialError(f"{what} does not vanish on face {i} of the horn")


def _section(Phi: InftyMorphism, wt: int) -> dict:
    """Linear section of the weight-wt slice of φ: target index -> source element."""
    S, T = Phi.source, Phi.target
    src = [i for i in range(S.space.dim) if S.space.weights[i] == wt]
    lin = {k[0]: v for k, v in Phi.components.get(1, {}).items()}
    out = {}
    for j in range(T.space.dim):
        if T.space.weights[j] != wt:
            continue
        cols = [i for i in src if S.degs[i] == T.degs[j]]
        tgt = [o for o in range(T.space.dim) if T.space.weights[o] == wt and T.degs[o] == T.degs[j]]
        rows = [{c: lin.get(i, {}).get(o, 0) for c, i in enumerate(cols)} for o in tgt]
        rhs = [1 if o == j else 0 for o in tgt]
        sol = solve_linear(rows, rhs, ncols=len(cols))
        if isinstance(sol, Inconsistent):
            raise LiftError(
                f"linear term is not surjective onto {T.space.names[j]} "
                f"(weight {wt}, degree {T.degs[j]}); not a fibration",
                weight=wt, degree=T.degs[j])
        out[j] = {cols[c]: a for c, a in enumerate(sol.x) if a}
    return out


def _apply_section(sec: dict, x: dict) -> dict:
    out = {}
    for j, c in x.items():
        for i, a in sec[j].items():
            ml.acc(out, i, c * a)
    return out


def _linear_slice(Phi: InftyMorphism, x: dict, wt: int) -> dict:
    """φ restricted to weight-wt inputs, read in the weight-wt target slice."""
    T = Phi.target
    out = {}
    lin = Phi.components.get(1, {})
    for i, c in x.items():
        for o, a in lin.get((i,), {}).items():
            if T.space.weights[o] == wt:
                ml.acc(out, o, c * a)
    return out


def _theta(L, gamma: dict, m: int, k: int, beta: dict, n: int) -> dict:
    """Lift β through p_n while filling γ: Moore-extend the new slice, then kill the defect."""
    wt = n - 1
    kappa = moore_fill({i: weight_part(L, g, wt) for i, g in gamma.items()}, m, k)
    theta0 = ml.add(beta, kappa)
    c = tcurv(L, theta0, n)
    if any(L.space.weights[i] != wt for i in c):
        raise SimplicialError(f"β is not Maurer–Cartan below weight {wt}")
    _assert_vanish_on_horn(c, m, k, "curvature defect")
    fix = ml.scale(contract(L, c, k, n), -1)
    _assert_vanish_on_horn(fix, m, k, "defect correction")
    theta = ml.add(theta0, fix)
    if tcurv(L, theta, n):
        raise SimplicialError(f"defect correction failed at weight {wt}")
    return theta


def _theta_vertex(L, beta: dict, n: int) -> dict:
    """m = 0: Ω_0 = ℚ, so the defect is cancelled by a linear solve in the new slice."""
    wt = n - 1
    c = tcurv(L, beta, n)
    if not c:
        return dict(beta)
    xs = [i for i in range(L.space.dim) if L.space.weights[i] == wt and L.degs[i] == 0]
    ys = [i for i in range(L.space.dim) if L.space.weights[i] == wt and L.degs[i] == 1]
    rows = [{a: L.differential.get(x, {}).get(y, 0) for a, x in enumerate(xs)} for y in ys]
    rhs = [-eval_vertex(c[y], 0) if y in c else 0 for y in ys]
    sol = solve_linear(rows, rhs, ncols=len(xs))
    if isinstance(sol, Inconsistent):
        raise LiftError(f"vertex defect at weight {wt} is not a coboundary", weight=wt, degree=1)
    return ml.add(beta, const_elem({xs[a]: v for a, v in enumerate(sol.x) if v}, 0))


def lift_through_tower_step(L: LInftyAlgebra, Phi: InftyMorphism | None, n: int, gamma: dict,
                            m: int, k: int, beta: dict, beta_t: dict | None, check: bool = True):
    """One tower level (Φ = None: plain horn filling) of the fibration lifting problem.

    ``gamma``: horn faces (i -> element of (L/F_n) ⊗ Ω_{m-1}); ``beta``: an
    m-simplex of L/F_{n-1} filling p(γ); ``beta_t``: an m-simplex of L̃/F_n
    with faces Φ_*(γ_i) and p̃(β̃) = Φ_*(β).  Returns (α, record).

    θ fills γ over β; η = Φ_*θ - β̃ lives in the abelian weight-(n-1) kernel
    of L̃ and vanishes on the horn; λ lifts η through φ, again vanishing on
    the horn; α = θ - λ.
    """
    wt = n - 1
    if check:
        if tcurv(L, beta, n - 1):
            raise SimplicialError("β is not Maurer–Cartan")
        for i, g in gamma.items():
            if tcurv(L, g, n):
                raise SimplicialError(f"horn face {i} is not Maurer–Cartan")
            if eface(beta, i) != restrict(L, g, n - 1):
                raise SimplicialError(f"β does not restrict to the horn on face {i}")
    theta = _theta(L, gamma, m, k, beta, n) if m > 0 else _theta_vertex(L, beta, n)
    if Phi is None:
        return theta, StepRecord(wt, True, True, True, True)

    T = Phi.target
    if check:
        if tcurv(T, beta_t, n):
            raise SimplicialError("β̃ is not Maurer–Cartan")
        for i, g in gamma.items():
            if Phi.data(n).pushforward(g) != eface(beta_t, i):
                raise SimplicialError(f"Φ(γ_{i}) differs from face {i} of β̃")
        if restrict(T, Phi.data(n - 1).pushforward(beta), n - 1) != restrict(T, beta_t, n - 1):
            raise SimplicialError("Φ(β) differs from the image of β̃")
    eta = esub(Phi.data(n).pushforward(theta), beta_t)
    if any(T.space.weights[i] != wt for i in eta):
        raise SimplicialError("η leaves the abelian kernel")
    eta_closed = not tdiff(T, eta, n)
    on_horn = all(not eface(eta, i) for i in range(m + 1) if i != k) if m > 0 else True
    if not eta_closed:
        raise SimplicialError(f"η is not Maurer–Cartan in the kernel at weight {wt}")
    if not on_horn:
        raise SimplicialError(f"η does not vanish on the horn at weight {wt}")
    if not eta:
        return theta, StepRecord(wt, True, True, True, True)

    sec = _section(Phi, wt)
    lam0 = _apply_section(sec, eta)
    if m > 0:
        lam = esub(lam0, contract(L, tdiff(L, lam0, n), k, n))
        _assert_vanish_on_horn(lam, m, k, "λ")
    else:
        lam = _lambda_vertex(L, Phi, lam0, wt, n)
    if tdiff(L, lam, n):
        raise SimplicialError(f"λ is not closed at weight {wt}")
    if _linear_slice(Phi, lam, wt) != eta:
        raise SimplicialError(f"λ does not lift η at weight {wt}")
    alpha = esub(theta, lam)
    return alpha, StepRecord(wt, False, eta_closed, on_horn, not lam)


def _lambda_vertex(L, Phi, lam0: dict, wt: int, n: int) -> dict:
    """m = 0: correct λ0 by an element of ker φ so that ∂λ = 0."""
    c = partial(L, lam0, n)
    if not c:
        return lam0
    xs = [i for i in range(L.space.dim) if L.space.weights[i] == wt and L.degs[i] == 0]
    ys = [i for i in range(L.space.dim) if L.space.weights[i] == wt and L.degs[i] == 1]
    T = Phi.target
    zs = [o for o in range(T.space.dim) if T.space.weights[o] == wt and T.degs[o] == 0]
    lin = Phi.components.get(1, {})
    rows = [{a: L.differential.get(x, {}).get(y, 0) for a, x in enumerate(xs)} for y in ys]
    rows += [{a: lin.get((x,), {}).get(z, 0) for a, x in enumerate(xs)} for z in zs]
    rhs = [-eval_vertex(c[y], 0) if y in c else 0 for y in ys] + [0] * len(zs)
    sol = solve_linear(rows, rhs, ncols=len(xs))
    if isinstance(sol, Inconsistent):
        raise LiftError(f"vertex lift fails at weight {wt}: φ is not acyclic there", weight=wt, degree=0)
    return ml.add(lam0, const_elem({xs[a]: v for a, v in enumerate(sol.x) if v}, 0))


def _random_relative_exact(L, rng, m: int, k: int | None, wt: int, n: int) -> dict:
    """D(f·μ) for random μ of degree -1 in the weight-wt slice; f vanishes on the horn
    (or at vertex 0 when k is None)."""
    if k is None:
        f = PolyForm.const(m) - PolyForm.t(m, 0)
    else:
        f = PolyForm.const(m)
        for i in range(m + 1):
            if i != k:
                f = f * PolyForm.t(m, i)
    mu = {}
    for i in range(L.space.dim):
        if L.space.weights[i] != wt:
            continue
        fd = -1 - L.degs[i]
        if 0 <= fd <= m:
            c = random_form(rng, m, fd, poly_degree=1, bound=2)
            if c:
                mu[i] = f * c
    return tdiff(L, mu, n)


def _fill(L, gamma: dict, m: int, k: int, rng=None) -> tuple:
    alpha = {}
    for n in range(2, depth_of(L) + 1):
        g = {i: restrict(L, x, n) for i, x in gamma.items()}
        alpha, _ = lift_through_tower_step(L, None, n, g, m, k, alpha, None, check=False)
        if rng is not None:
            alpha = ml.add(alpha, _random_relative_exact(L, rng, m, k, n - 1, n))
    return alpha


def fill_horn_nilpotent(L: LInftyAlgebra, h: HornData, rng: random.Random | None = None) -> Simplex:
    """Fill a horn by lifting up the weight tower (target algebra zero).

    With ``rng`` a random relative coboundary is added at each level, which
    gives a random filler instead of the canonical one.
    """
    alpha = _fill(L, h.values(), h.m, h.k, rng)
    out = Simplex(L, h.m, alpha)
    for i, s in h.faces.items():
        if eface(alpha, i) != s.value:
            raise SimplicialError(f"filler face {i} does not match the horn")
    return out


@dataclass
class LiftResult:
    simplex: Simplex
    records: list


def kan_fibration_lift(Phi: InftyMorphism, h: HornData | None, b: Simplex,
                       check_fibration: bool = True) -> LiftResult:
    """Solve d_i α = h_i (i != k) and Φ_* α = b.

    ``h=None`` lifts a vertex (b a 0-simplex), which needs Φ acyclic at the
    weights where the vertex has a defect.
    """
    if check_fibration and not classify_morphism(Phi).fibration:
        raise LiftError("morphism is not a fibration")
    S, T = Phi.source, Phi.target
    m = h.m if h is not None else 0
    k = h.k if h is not None else 0
    if b.n != m:
        raise SimplicialError("target simplex has the wrong dimension")
    gamma = h.values() if h is not None else {}
    for i, g in gamma.items():
        if Phi.data().pushforward(g) != eface(b.value, i):
            raise SimplicialError(f"Φ(h_{i}) is not face {i} of the target simplex")
    N = max(depth_of(S), depth_of(T))
    alpha = {}
    records = []
    for n in range(2, N + 1):
        g = {i: restrict(S, x, n) for i, x in gamma.items()}
        bt = restrict(T, b.value, n)
        alpha, rec = lift_through_tower_step(S, Phi, n, g, m, k, alpha, bt)
        records.append(rec)
    out = Simplex(S, m, alpha)
    if Phi.data().pushforward(alpha) != b.value:
        raise SimplicialError("lift does not map onto the target simplex")
    for i, g in gamma.items():
        if eface(alpha, i) != g:
            raise SimplicialError(f"lift face {i} does not match the horn")
    return LiftResult(out, records)


def lift_vertex(Phi: InftyMorphism, b: dict) -> dict:
    res = kan_fibration_lift(Phi, None, Simplex.vertex(Phi.target, b))
    return {i: eval_vertex(c, 0) for i, c in res.simplex.value.items() if eval_vertex(c, 0)}


def apply_morphism(Phi: InftyMorphism, s: Simplex) -> Simplex:
    """Φ^(n)_*: the pushforward with form legs carried along."""
    if tcurv(s.algebra, s.value):
        raise SimplicialError("apply_morphism needs a Maurer–Cartan simplex")
    return Simplex(Phi.target, s.n, Phi.data().pushforward(s.value))


# ---------------------------------------------------------------------------
# random simplices


def random_simplex(L: LInftyAlgebra, n: int, rng: random.Random, bound: int = 3) -> Simplex:
    """A random n-simplex: a random MC vertex at 0, extended weight by weight.

    At each weight the defect vanishes at vertex 0 and is cancelled by the
    contraction toward that vertex; a random D-exact term vanishing at vertex
    0 is then added.
    """
    v0 = sample_mc(L, rng, bound) if L.filtered else {}
    alpha = {}
    for m in range(2, depth_of(L) + 1):
        wt = m - 1
        a = const_elem(weight_part(L, v0, wt), n)
        theta = ml.add(alpha, a)
        c = tcurv(L, theta, m)
        if n > 0:
            theta = ml.add(theta, ml.scale(contract(L, c, 0, m), -1))
            theta = ml.add(theta, _random_relative_exact(L, rng, n, None, wt, m))
        if tcurv(L, theta, m):
            raise SimplicialError(f"random simplex construction failed at weight {wt}")
        alpha = theta
    return Simplex(L, n, alpha)


# ---------------------------------------------------------------------------
# edges


@dataclass
class EdgeSearch:
    found: bool
    edge: Simplex | None = None
    weight: int | None = None
    max_poly_degree: int | None = None
    message: str = ""


def _edge_unknowns(L, wt: int, D: int, low: int | None = None):
    """Basis of degree-0 elements of weights low..wt (default: wt only) in L ⊗ Ω_1 vanishing at both ends."""
    t = PolyForm.t(1, 1)
    bump = t * (PolyForm.const(1) - t)
    dt = PolyForm.dt(1, 1)
    out = []
    for i in range(L.space.dim):
        if not (wt if low is None else low) <= L.space.weights[i] <= wt:
            continue
        if L.degs[i] == 0:
            for p in range(D + 1):
                out.append({i: bump * PolyForm(1, {((p,), ()): 1})})
        elif L.degs[i] == -1:
            for p in range(D + 1):
                out.append({i: PolyForm(1, {((p,), ()): 1}) * dt})
    return out


def _solve_forms(images: list, rhs: dict, pivot_order="lex"):
    """Find coefficients c with Σ c_j images[j] = rhs (elements of L ⊗ Ω)."""
    keys = {}
    for x in images + [rhs]:
        for i, c in x.items():
            for kk in c.terms:
                keys.setdefault((i, kk), len(keys))
    rows = [dict() for _ in keys]
    for j, x in enumerate(images):
        for i, c in x.items():
            for kk, v in c.terms.items():
                rows[keys[(i, kk)]][j] = v
    b = [0] * len(keys)
    for i, c in rhs.items():
        for kk, v in c.terms.items():
            b[keys[(i, kk)]] = v
    return solve_linear(rows, b, ncols=len(images), pivot_order=pivot_order)


def connect_by_edge(L: LInftyAlgebra, a0: dict, a1: dict, max_poly_degree: int = 4) -> EdgeSearch:
    """Search for a 1-simplex with vertex 0 at a0 and vertex 1 at a1.

    Weight by weight, the new slice of the edge solves a linear equation with
    polynomial unknowns of degree <= D, D escalated up to ``max_poly_degree``.
    The slice at weight wt is tried first; if that fails, corrections of all
    weights <= wt are allowed (the linear solve keeps the lower curvature zero
    and the bracket terms are rechecked). For abelian algebras the problem is
    linear and this search is complete; otherwise a failure is a report under
    these caps rather than a proof that no edge exists.
    """
    for a in (a0, a1):
        if L.structure().curvature(a):
            raise SimplicialError("connect_by_edge needs Maurer–Cartan endpoints")
    t = PolyForm.t(1, 1)
    one = PolyForm.const(1)
    alpha = {}
    for n in range(2, depth_of(L) + 1):
        wt = n - 1
        lin = {}
        for i in L.space.indices(max_weight=wt, min_weight=wt):
            if L.degs[i] != 0:
                continue
            f = (one - t) * a0.get(i, 0) + t * a1.get(i, 0)
            if f:
                lin[i] = f
        theta = ml.add(alpha, lin)
        r = ml.scale(tcurv(L, theta, n), -1)
        if not r:
            alpha = theta
            continue
        start = max(c.poly_degree() for c in r.values())
        top = max(start, max_poly_degree)
        # first the weight-wt slice alone; then lower weights too, which matters
        # when ∂ raises weight (a gauge of weight < wt can hit the weight-wt defect)
        fixed = None
        for low in (wt, 1):
            for D in range(start, top + 1):
                basis = _edge_unknowns(L, wt, D, low)
                sol = _solve_forms([tdiff(L, x, n) for x in basis], r)
                if isinstance(sol, Inconsistent):
                    continue
                y = {}
                for c, x in zip(sol.x, basis):
                    if c:
                        y = ml.add(y, x, c)
                cand = ml.add(theta, y)
                # lower-weight unknowns feed the brackets, so recheck exactly
                if not tcurv(L, cand, n):
                    fixed = cand
                    break
            if fixed is not None or wt == 1:
                break
        if fixed is None:
            return EdgeSearch(False, weight=wt, max_poly_degree=top,
                              message=f"no edge slice at weight {wt} with polynomial degree <= {top}")
        alpha = fixed
    edge = Simplex(L, 1, alpha)
    if eval_at(alpha, 0) != {i: c for i, c in a0.items() if c} or \
            eval_at(alpha, 1) != {i: c for i, c in a1.items() if c}:
        raise SimplicialError("edge endpoints do not match")
    return EdgeSearch(True, edge)
