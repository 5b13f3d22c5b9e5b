"""Polynomial differential forms on the standard simplex.

Coordinates: vertex ``i`` of Δ^n is the point with barycentric coordinate
``t_i = 1``.  Forms are stored in the coordinates ``t_1 .. t_n`` only, with
``t_0 = 1 - Σ t_i`` and ``dt_0 = -Σ dt_i`` eliminated, so equality of forms is
equality of term dictionaries.

A term key is ``(exponents, wedge)``: ``exponents`` has length n and ``wedge``
is a strictly increasing tuple of coordinate numbers in ``1..n``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from itertools import product
from math import comb


class FormError(ValueError):
    pass


def merge_wedge(a: tuple, b: tuple):
    """Sign and sorted tuple of dt_a ^ dt_b, or (0, None) on a repeated factor."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    if set(a) & set(b):
        return 0, None
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


class PolyForm:
    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, n, c=1):
        return cls(n, {((0,) * n, ()): Fraction(c)})

    @classmethod
    def t(cls, n, i):
        if not 0 <= i <= n:
            raise FormError(f"coordinate t{i} out of range for n={n}")
        if i == 0:
            out = cls.const(n)
            for j in range(1, n + 1):
                out = out - cls.t(n, j)
            return out
        e = [0] * n
        e[i - 1] = 1
        return cls(n, {(tuple(e), ()): 1})

    @classmethod
    def dt(cls, n, i):
        if not 0 <= i <= n:
            raise FormError(f"coordinate dt{i} out of range for n={n}")
        if i == 0:
            return cls(n, {((0,) * n, (j,)): -1 for j in range(1, n + 1)})
        return cls(n, {((0,) * n, (i,)): 1})

    @classmethod
    def zero(cls, n):
        return cls(n)

    # -- basics -----------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, PolyForm):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == PolyForm.const(self.n, other) if other else not self.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def _check(self, other):
        if other.n != self.n:
            raise FormError(f"dimension mismatch: Ω_{self.n} vs Ω_{other.n}")

    def _lift(self, other):
        if isinstance(other, PolyForm):
            self._check(other)
            return other
        return PolyForm.const(self.n, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        r = PolyForm(self.n)
        r.terms = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = PolyForm(self.n)
        r.terms = {k: -v for k, v in self.terms.items()}
        return r

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, PolyForm):
            other = Fraction(other)
            if not other:
                return PolyForm(self.n)
            r = PolyForm(self.n)
            r.terms = {k: v * other for k, v in self.terms.items()}
            return r
        return wedge(self, other)

    def __rmul__(self, other):
        # scalars commute with everything
        return self.__mul__(other)

    def degrees(self) -> set:
        return {len(w) for (_, w) in self.terms}

    @property
    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) > 1:
            raise FormError("form is not homogeneous")
        return degs.pop() if degs else 0

    def part(self, k: int) -> "PolyForm":
        r = PolyForm(self.n)
        r.terms = {key: v for key, v in self.terms.items() if len(key[1]) == k}
        return r

    def homogeneous_parts(self):
        """List of (form degree, homogeneous part), increasing degree."""
        by = {}
        for key, v in self.terms.items():
            by.setdefault(len(key[1]), {})[key] = v
        out = []
        for k in sorted(by):
            r = PolyForm(self.n)
            r.terms = by[k]
            out.append((k, r))
        return out

    def poly_degree(self) -> int:
        return max((sum(e) for (e, _) in self.terms), default=0)

    def __repr__(self):
        return f"PolyForm({self.n}, {render(self)!r})"

    def __str__(self):
        return render(self)

    # -- calculus -----------------------------------------------------------
    def d(self) -> "PolyForm":
        return d(self)

    def face(self, i):
        return face(self, i)

    def degeneracy(self, j):
        return degeneracy(self, j)


def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    a._check(b)
    out = {}
    for (ea, wa), ca in a.terms.items():
        for (eb, wb), cb in b.terms.items():
            s, w = merge_wedge(wa, wb)
            if not s:
                continue
            key = (tuple(x + y for x, y in zip(ea, eb)), w)
            v = out.get(key, 0) + s * ca * cb
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    r = PolyForm(a.n)
    r.terms = out
    return r


def d(a: PolyForm) -> PolyForm:
    out = {}
    for (e, w), c in a.terms.items():
        for i in range(a.n):
            if not e[i]:
                continue
            s, nw = merge_wedge((i + 1,), w)
            if not s:
                continue
            ne = list(e)
            ne[i] -= 1
            key = (tuple(ne), nw)
            v = out.get(key, 0) + s * c * e[i]
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    r = PolyForm(a.n)
    r.terms = out
    return r


def pullback(a: PolyForm, images: list, m: int) -> PolyForm:
    """Substitute t_k -> images[k-1] (0-forms on Δ^m) and dt_k -> d(images[k-1])."""
    if len(images) != a.n:
        raise FormError("need one image per coordinate")
    dimg = [d(x) for x in images]
    powcache = {}

    def power(k, p):
        key = (k, p)
        if key not in powcache:
            if p == 0:
                powcache[key] = PolyForm.const(m)
            else:
                powcache[key] = wedge(power(k, p - 1), images[k])
        return powcache[key]

    out = PolyForm(m)
    for (e, w), c in a.terms.items():
        term = PolyForm.const(m, c)
        for k, p in enumerate(e):
            if p:
                term = wedge(term, power(k, p))
        for k in w:
            term = wedge(term, dimg[k - 1])
        out = out + term
    return out


def face(a: PolyForm, i: int) -> PolyForm:
    """d_i : Ω_n -> Ω_{n-1}, restriction to the face opposite vertex i."""
    n = a.n
    if n < 1 or not 0 <= i <= n:
        raise FormError(f"face index {i} out of range for Ω_{n}")
    if i >= 1:
        # t_i -> 0 and relabel the later coordinates: a monomial substitution
        out = {}
        for (e, w), c in a.terms.items():
            if e[i - 1] or i in w:
                continue
            key = (e[:i - 1] + e[i:], tuple(k - 1 if k > i else k for k in w))
            out[key] = c
        r = PolyForm(n - 1)
        r.terms = out
        return r
    images = []
    for j in range(1, n + 1):
        if j < i:
            images.append(PolyForm.t(n - 1, j))
        elif j == i:
            images.append(PolyForm.zero(n - 1))
        else:
            images.append(PolyForm.t(n - 1, j - 1))
    return pullback(a, images, n - 1)


def degeneracy(a: PolyForm, j: int) -> PolyForm:
    """s_j : Ω_n -> Ω_{n+1}, pullback along the collapse of vertices j, j+1."""
    n = a.n
    if not 0 <= j <= n:
        raise FormError(f"degeneracy index {j} out of range for Ω_{n}")
    images = []
    for k in range(1, n + 1):
        if k < j:
            images.append(PolyForm.t(n + 1, k))
        elif k == j:
            images.append(PolyForm.t(n + 1, j) + PolyForm.t(n + 1, j + 1))
        else:
            images.append(PolyForm.t(n + 1, k + 1))
    return pullback(a, images, n + 1)


def vertex_inclusion(a: PolyForm, verts: tuple) -> PolyForm:
    """Restrict to the sub-simplex spanned by the increasing vertex list ``verts``."""
    m = len(verts) - 1
    images = []
    for k in range(1, a.n + 1):
        if k in verts:
            images.append(PolyForm.t(m, verts.index(k)))
        else:
            images.append(PolyForm.zero(m))
    return pullback(a, images, m)


def eval_vertex(a: PolyForm, v: int) -> Fraction:
    if not 0 <= v <= a.n:
        raise FormError(f"vertex {v} out of range for Ω_{a.n}")
    total = Fraction(0)
    for (e, w), c in a.terms.items():
        if w:
            continue
        if v == 0:
            if not any(e):
                total += c
        elif all(p == 0 for k, p in enumerate(e) if k != v - 1):
            total += c
    return total


def _shift_poly(terms: dict, var: int, delta: int, n: int) -> dict:
    """Substitute t_var -> t_var + delta in a dict exps -> coeff."""
    out = {}
    for e, c in terms.items():
        p = e[var]
        for q in range(p + 1):
            ne = list(e)
            ne[var] = q
            v = c * comb(p, q) * Fraction(delta) ** (p - q)
            key = tuple(ne)
            s = out.get(key, 0) + v
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def dilation_homotopy(a: PolyForm, v: int) -> PolyForm:
    """Radial contraction toward vertex ``v``.

    Satisfies ``d h + h d = id - ev_v`` (ev_v only sees 0-forms) and maps
    polynomial forms to polynomial forms.  Faces through ``v`` are preserved:
    a form vanishing on such a face has image vanishing there too.
    """
    n = a.n
    if not 0 <= v <= n:
        raise FormError(f"vertex {v} out of range for Ω_{n}")
    # group by wedge, coefficient polynomials in u = t - e_v
    by_w = {}
    for (e, w), c in a.terms.items():
        if w:
            by_w.setdefault(w, {})[e] = c
    out = PolyForm(n)
    for w, poly in by_w.items():
        k = len(w)
        if v:
            poly = _shift_poly(poly, v - 1, 1, n)  # now in u coordinates
        scaled = {e: c / (k + sum(e)) for e, c in poly.items()}
        if v:
            scaled = _shift_poly(scaled, v - 1, -1, n)
        coeff = PolyForm(n, {(e, ()): c for e, c in scaled.items()})
        for j, i in enumerate(w):
            rest = w[:j] + w[j + 1:]
            lin = PolyForm.t(n, i) - (1 if i == v else 0)
            term = wedge(coeff, lin) * (-1 if j % 2 else 1)
            out = out + wedge(term, PolyForm(n, {((0,) * n, rest): 1}))
    return out


# ---------------------------------------------------------------------------
# text rendering

def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _term_key(item):
    (e, w), _ = item
    return (len(w), w, sum(e), tuple(-x for x in e))


def render(a: PolyForm) -> str:
    if not a.terms:
        return "0"
    parts = []
    for (e, w), c in sorted(a.terms.items(), key=_term_key):
        factors = []
        for i, p in enumerate(e):
            if p == 1:
                factors.append(f"t{i + 1}")
            elif p:
                factors.append(f"t{i + 1}^{p}")
        if w:
            factors.append("^".join(f"dt{i}" for i in w))
        mag = abs(c)
        if factors:
            body = "*".join(factors) if mag == 1 else _fmt_coeff(mag) + "*" + "*".join(factors)
        else:
            body = _fmt_coeff(mag)
        parts.append(("- " if c < 0 else "+ ") + body)
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


_TOKEN = re.compile(r"\s*([+-])?\s*([^+-]+)")
_NUM = re.compile(r"^\d+(/\d+)?$")
_TPOW = re.compile(r"^t(\d+)(?:\^(\d+))?$")
_WEDGE = re.compile(r"^dt\d+(\^dt\d+)*$")


def parse(text: str, n: int) -> PolyForm:
    """Inverse of :func:`render`, e.g. ``3/2*t1^2*dt1^dt2 - t1 + 1``."""
    s = text.replace("−", "-").strip()
    if not s:
        raise FormError("empty form")
    out = PolyForm(n)
    pos = 0
    first = True
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise FormError(f"cannot parse form {text!r}")
        sign, body = m.group(1), m.group(2).strip()
        if sign is None and not first:
            raise FormError(f"missing operator in {text!r}")
        first = False
        pos = m.end()
        coeff = Fraction(-1 if sign == "-" else 1)
        term = PolyForm.const(n)
        for f in body.split("*"):
            f = f.strip()
            if _NUM.match(f):
                coeff *= Fraction(f)
            elif _TPOW.match(f):
                g = _TPOW.match(f)
                i, p = int(g.group(1)), int(g.group(2) or 1)
                if not 1 <= i <= n:
                    raise FormError(f"t{i} out of range for Ω_{n}")
                term = wedge(term, _power(PolyForm.t(n, i), p))
            elif _WEDGE.match(f):
                for piece in f.split("^"):
                    i = int(piece[2:])
                    if not 1 <= i <= n:
                        raise FormError(f"dt{i} out of range for Ω_{n}")
                    term = wedge(term, PolyForm.dt(n, i))
            else:
                raise FormError(f"bad factor {f!r} in {text!r}")
        out = out + term * coeff
    return out


def _power(x: PolyForm, p: int) -> PolyForm:
    r = PolyForm.const(x.n)
    for _ in range(p):
        r = wedge(r, x)
    return r


def random_form(rng, n: int, form_degree: int, poly_degree: int = 1, bound: int = 2) -> PolyForm:
    """Random homogeneous form with small integer coefficients."""
    out = {}
    from itertools import combinations

    wedges = list(combinations(range(1, n + 1), form_degree))
    exps = [e for e in product(range(poly_degree + 1), repeat=n) if sum(e) <= poly_degree]
    for w in wedges:
        for e in exps:
            c = rng.randint(-bound, bound)
            if c:
                out[(e, w)] = c
    return PolyForm(n, out)
