"""Graded-symmetric multilinear maps with Koszul signs.

Elements are sparse dicts ``basis index -> coefficient``.  A coefficient is
either a ``Fraction`` (form degree 0) or a :class:`~linfmc.sullivan_forms.PolyForm`;
the latter realizes elements of ``L ⊗ Ω_n`` as ``Σ e_i ⊗ ω_i``.

A multilinear table maps a weakly increasing index tuple to an output element.
Its value on unsorted arguments carries the Koszul sign of the sorting
permutation.  Structure-map coefficients may themselves be forms; they are
written to the right, ``f = f_0 ⊗ θ``, so that

    f(e_1 ω_1, ..., e_m ω_m) = ± f_0(e_1, ..., e_m) ⊗ θ ω_1 ... ω_m

with the sign obtained by moving every coefficient past the basis vectors to
its right.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import factorial

from .sullivan_forms import PolyForm


def cdeg(c) -> int:
    return c.degree if isinstance(c, PolyForm) else 0


def split(c):
    """Homogeneous pieces of a coefficient as (degree, piece)."""
    if isinstance(c, PolyForm):
        return c.homogeneous_parts()
    return [(0, c)]


def acc(out: dict, key, val):
    if not val:
        return
    cur = out.get(key)
    s = val if cur is None else cur + val
    if s:
        out[key] = s
    else:
        del out[key]


def add(u: dict, v: dict, scale=1) -> dict:
    out = dict(u)
    for k, c in v.items():
        acc(out, k, c * scale if scale != 1 else c)
    return out


def scale(u: dict, s) -> dict:
    if not s:
        return {}
    return {k: c * s for k, c in u.items() if c}


def is_zero(u: dict) -> bool:
    return not any(u.values())


def koszul_sort(idx: tuple, degs) -> tuple:
    """Sorted index tuple and the Koszul sign of sorting (0 if an odd index repeats)."""
    items = list(idx)
    sign = 1
    # insertion sort, tracking transpositions of adjacent graded elements
    for a in range(1, len(items)):
        b = a
        while b > 0 and items[b - 1] > items[b]:
            if degs[items[b - 1]] % 2 and degs[items[b]] % 2:
                sign = -sign
            items[b - 1], items[b] = items[b], items[b - 1]
            b -= 1
    for a in range(1, len(items)):
        if items[a] == items[a - 1] and degs[items[a]] % 2:
            return tuple(items), 0
    return tuple(items), sign


def perm_sign(order, tdegs) -> int:
    """Koszul sign of listing graded elements (degrees ``tdegs``) in ``order``."""
    sign = 1
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b] and tdegs[order[a]] % 2 and tdegs[order[b]] % 2:
                sign = -sign
    return sign


def terms(elem: dict):
    out = []
    for i, c in elem.items():
        for k, piece in split(c):
            out.append((i, piece, k))
    return out


def eval_table(table: dict, args: list, degs, keep=None) -> dict:
    """Evaluate a multilinear table on a list of elements.

    ``degs`` are the basis degrees of the input space (input and output share a
    basis in every use here).  ``keep`` optionally filters output indices.
    """
    if not table:
        return {}
    out = {}
    tlists = [terms(a) for a in args]
    m = len(args)
    for combo in product(*tlists):
        idx = tuple(t[0] for t in combo)
        key, sgn = koszul_sort(idx, degs)
        if not sgn:
            continue
        outs = table.get(key)
        if not outs:
            continue
        # move each coefficient to the right past later basis vectors
        s = sgn
        later = 0
        coeff = None
        for p in range(m - 1, -1, -1):
            i, c, k = combo[p]
            if k % 2 and later % 2:
                s = -s
            later += degs[i]
        for p in range(m):
            c = combo[p][1]
            coeff = c if coeff is None else coeff * c
        total_in = later
        for o, theta in outs.items():
            if keep is not None and o not in keep:
                continue
            for tk, th in split(theta):
                s2 = -s if (tk % 2 and total_in % 2) else s
                val = th * coeff
                acc(out, o, val if s2 == 1 else -val)
    return out


def apply_diff(diff: dict, elem: dict, degs, keep=None) -> dict:
    """(∂ ⊗ 1 + 1 ⊗ d) on an element; ``diff`` maps index -> output element."""
    out = {}
    for i, c in elem.items():
        for o, theta in diff.get(i, {}).items():
            if keep is not None and o not in keep:
                continue
            for tk, th in split(theta):
                v = th * c
                acc(out, o, -v if (tk % 2 and degs[i] % 2) else v)
        if isinstance(c, PolyForm):
            dc = c.d()
            acc(out, i, -dc if degs[i] % 2 else dc)
    return out


def unshuffles(n: int, k: int):
    rest = range(n)
    for I in combinations(rest, k):
        J = tuple(j for j in rest if j not in I)
        yield I, J


def set_partitions(items: tuple):
    """Unordered set partitions; blocks listed by their first element."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [(first,)] + part
        for b in range(len(part)):
            yield part[:b] + [tuple(sorted((first,) + part[b]))] + part[b + 1:]


def words(indices, length: int, degs, weights=None, max_weight=None):
    """Weakly increasing index tuples; drops odd repeats and overweight words."""
    for w in combinations_with_replacement(sorted(indices), length):
        if any(w[a] == w[a + 1] and degs[w[a]] % 2 for a in range(len(w) - 1)):
            continue
        if max_weight is not None and sum(weights[i] for i in w) > max_weight:
            continue
        yield w


def basis_elem(i, one=Fraction(1)):
    return {i: one}


class Structure:
    """A (possibly form-valued) collection of structure maps on one basis."""

    def __init__(self, degs, diff, brackets, cap, keep=None):
        self.degs = degs
        self.diff = diff
        self.brackets = brackets
        self.cap = cap
        self.keep = keep

    def ell(self, k: int, args: list) -> dict:
        if k == 1:
            return apply_diff(self.diff, args[0], self.degs, self.keep)
        if k > self.cap:
            return {}
        return eval_table(self.brackets.get(k, {}), args, self.degs, self.keep)

    def curvature(self, alpha: dict) -> dict:
        out = self.ell(1, [alpha])
        for m in range(2, self.cap + 1):
            table = self.brackets.get(m)
            if table:
                out = add(out, eval_table(table, [alpha] * m, self.degs, self.keep),
                          Fraction(1, factorial(m)))
        return out


def elem_degree(x: dict, degs) -> int:
    ds = {degs[i] + k for i, c in x.items() for k, _ in split(c)}
    if len(ds) > 1:
        raise ValueError("element is not homogeneous")
    return ds.pop() if ds else 0


def linf_relation(S: Structure, xs: list, xdegs: list) -> dict:
    """pr Q²(x_1 ... x_n): Σ ε ℓ(ℓ(x_I), x_J) over unshuffles."""
    n = len(xs)
    out = {}
    for k in range(1, n + 1):
        l = n - k + 1
        if (k > 1 and k > S.cap) or (l > 1 and l > S.cap):
            continue
        for I, J in unshuffles(n, k):
            sgn = perm_sign(I + J, xdegs)
            inner = S.ell(k, [xs[i] for i in I])
            if not inner:
                continue
            outer = S.ell(l, [inner] + [xs[j] for j in J])
            out = add(out, outer, sgn)
    return out


class MorphismData:
    """Components of an ∞-morphism: arity -> table (source words -> target element)."""

    def __init__(self, components, sdegs, tdegs, cap, keep=None):
        self.components = components
        self.sdegs = sdegs
        self.tdegs = tdegs
        self.cap = cap
        self.keep = keep

    def apply(self, args: list) -> dict:
        if len(args) > self.cap:
            return {}
        return eval_table(self.components.get(len(args), {}), args, self.sdegs, self.keep)

    def pushforward(self, alpha: dict) -> dict:
        out = {}
        for m in range(1, self.cap + 1):
            if self.components.get(m):
                out = add(out, self.apply([alpha] * m), Fraction(1, factorial(m)))
        return out


def morphism_relation(F: MorphismData, S: Structure, T: Structure, xs: list, xdegs: list) -> dict:
    """pr Φ Q(x) - pr Q̃ Φ(x) on the word x_1 ... x_n."""
    n = len(xs)
    out = {}
    for k in range(1, n + 1):
        if k > 1 and k > S.cap:
            continue
        for I, J in unshuffles(n, k):
            inner = S.ell(k, [xs[i] for i in I])
            if not inner:
                continue
            sgn = perm_sign(I + J, xdegs)
            out = add(out, F.apply([inner] + [xs[j] for j in J]), sgn)
    for part in set_partitions(tuple(range(n))):
        j = len(part)
        if j > 1 and j > T.cap:
            continue
        order = tuple(i for b in part for i in b)
        sgn = perm_sign(order, xdegs)
        images = [F.apply([xs[i] for i in b]) for b in part]
        if any(not im for im in images):
            continue
        out = add(out, T.ell(j, images), -sgn)
    return out


def compose_relation(G: MorphismData, F: MorphismData, xs: list, xdegs: list) -> dict:
    """(G ∘ F)'(x_1 ... x_n) as a sum over set partitions."""
    out = {}
    n = len(xs)
    for part in set_partitions(tuple(range(n))):
        order = tuple(i for b in part for i in b)
        sgn = perm_sign(order, xdegs)
        images = [F.apply([xs[i] for i in b]) for b in part]
        if any(not im for im in images):
            continue
        out = add(out, G.apply(images), sgn)
    return out
