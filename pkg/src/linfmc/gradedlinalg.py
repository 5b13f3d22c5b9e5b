"""Exact rational graded linear algebra.

Vectors are sparse ``dict[int, Fraction]`` keyed by basis position; matrices
are lists of sparse rows.  Nothing here ever touches a float.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Vec = dict  # dict[int, Fraction]


class LinAlgError(ValueError):
    pass


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.replace("−", "-").strip())
    return Fraction(x)


def vadd(u: Vec, v: Vec, scale=1) -> Vec:
    out = dict(u)
    for i, c in v.items():
        s = out.get(i, 0) + scale * c
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out


def vscale(u: Vec, s) -> Vec:
    if not s:
        return {}
    return {i: s * c for i, c in u.items()}


def vclean(u: Vec) -> Vec:
    return {i: c for i, c in u.items() if c}


# ---------------------------------------------------------------------------
# graded spaces and maps


@dataclass(frozen=True)
class GradedSpace:
    """Finite basis of named vectors, each carrying a degree and a filtration weight."""

    names: tuple
    degrees: tuple
    weights: tuple
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not (len(self.names) == len(self.degrees) == len(self.weights)):
            raise LinAlgError("basis fields have different lengths")
        if len(set(self.names)) != len(self.names):
            raise LinAlgError("basis names are not unique")
        for n, w in zip(self.names, self.weights):
            if int(w) != w or w < 1:
                raise LinAlgError(f"weight of {n!r} must be an integer >= 1")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    @classmethod
    def from_basis(cls, basis: Iterable) -> "GradedSpace":
        basis = list(basis)
        return cls(
            tuple(b[0] for b in basis),
            tuple(int(b[1]) for b in basis),
            tuple(int(b[2]) if len(b) > 2 else 1 for b in basis),
        )

    def __len__(self):
        return len(self.names)

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise LinAlgError(f"unknown basis element {name!r}") from None

    def basis(self):
        return list(zip(self.names, self.degrees, self.weights))

    def indices(self, degree=None, min_weight=1, max_weight=None) -> list:
        return [
            i
            for i in range(self.dim)
            if (degree is None or self.degrees[i] == degree)
            and self.weights[i] >= min_weight
            and (max_weight is None or self.weights[i] <= max_weight)
        ]

    def degree_range(self) -> list:
        return sorted(set(self.degrees))

    def max_weight(self) -> int:
        return max(self.weights, default=0)

    def subspace(self, keep) -> "GradedSpace":
        keep = [i for i in range(self.dim) if keep(i)]
        return GradedSpace(
            tuple(self.names[i] for i in keep),
            tuple(self.degrees[i] for i in keep),
            tuple(self.weights[i] for i in keep),
        )

    def vector(self, coeffs: dict) -> Vec:
        return vclean({self.index(n): frac(c) for n, c in coeffs.items()})

    def named(self, v: Vec) -> dict:
        return {self.names[i]: c for i, c in sorted(v.items())}


@dataclass(frozen=True)
class GradedMap:
    """Sparse matrix between graded spaces, homogeneous of a fixed degree."""

    source: GradedSpace
    target: GradedSpace
    degree: int
    entries: dict  # (target index, source index) -> Fraction

    def __post_init__(self):
        for (t, s), c in self.entries.items():
            if not c:
                raise LinAlgError("zero entries must not be stored")
            if self.target.degrees[t] - self.source.degrees[s] != self.degree:
                raise LinAlgError(
                    f"entry {self.source.names[s]} -> {self.target.names[t]} "
                    f"does not have degree {self.degree}"
                )

    @classmethod
    def from_columns(cls, source, target, degree, columns: dict) -> "GradedMap":
        entries = {}
        for s, col in columns.items():
            for t, c in col.items():
                if c:
                    entries[(t, s)] = frac(c)
        return cls(source, target, degree, entries)

    @classmethod
    def identity(cls, space) -> "GradedMap":
        return cls(space, space, 0, {(i, i): Fraction(1) for i in range(space.dim)})

    @classmethod
    def zero(cls, source, target, degree=0) -> "GradedMap":
        return cls(source, target, degree, {})

    def column(self, s: int) -> Vec:
        return {t: c for (t, ss), c in self.entries.items() if ss == s}

    def __call__(self, v: Vec) -> Vec:
        out: Vec = {}
        cols = self._columns()
        for s, c in v.items():
            for t, a in cols.get(s, {}).items():
                out[t] = out.get(t, 0) + a * c
        return vclean(out)

    def _columns(self) -> dict:
        cols = self.__dict__.get("_cols")
        if cols is None:
            cols = {}
            for (t, s), c in self.entries.items():
                cols.setdefault(s, {})[t] = c
            object.__setattr__(self, "_cols", cols)
        return cols

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self o other"""
        cols = {s: self(other.column(s)) for s in range(other.source.dim)}
        return GradedMap.from_columns(other.source, self.target, self.degree + other.degree, cols)

    def rows(self, target_idx: Sequence[int], source_idx: Sequence[int]) -> list:
        """Dense-indexed sparse rows of the sub-block target_idx x source_idx."""
        tpos = {t: r for r, t in enumerate(target_idx)}
        spos = {s: c for c, s in enumerate(source_idx)}
        rows = [dict() for _ in target_idx]
        for (t, s), c in self.entries.items():
            if t in tpos and s in spos:
                rows[tpos[t]][spos[s]] = c
        return rows

    def is_weight_preserving(self) -> bool:
        return all(
            self.target.weights[t] >= self.source.weights[s] for (t, s) in self.entries
        )


@dataclass(frozen=True)
class ChainComplex:
    space: GradedSpace
    differential: GradedMap

    def __post_init__(self):
        d = self.differential
        if d.degree != 1 or d.source != self.space or d.target != self.space:
            raise LinAlgError("differential must be a degree 1 endomorphism of the space")
        if not d.is_weight_preserving():
            raise LinAlgError("differential must map F_k into F_k")
        sq = d.compose(d)
        if sq.entries:
            (t, s) = next(iter(sq.entries))
            raise LinAlgError(
                f"differential does not square to zero (on {self.space.names[s]})"
            )

    @classmethod
    def zero(cls, space) -> "ChainComplex":
        return cls(space, GradedMap.zero(space, space, 1))

    def restrict_weight(self, n: int) -> "ChainComplex":
        """The subcomplex F_n spanned by basis elements of weight >= n."""
        idx = self.space.indices(min_weight=n)
        sub = self.space.subspace(lambda i: self.space.weights[i] >= n)
        pos = {i: k for k, i in enumerate(idx)}
        entries = {
            (pos[t], pos[s]): c
            for (t, s), c in self.differential.entries.items()
            if s in pos
        }
        return ChainComplex(sub, GradedMap(sub, sub, 1, entries))


# ---------------------------------------------------------------------------
# elimination


@dataclass
class Solution:
    x: list


@dataclass
class Inconsistent:
    """Left null vector y with y A = 0 and y b != 0."""

    y: list
    value: Fraction


def _as_rows(A, ncols=None):
    rows = []
    for r in A:
        if isinstance(r, dict):
            rows.append({c: frac(v) for c, v in r.items() if v})
        else:
            rows.append({c: frac(v) for c, v in enumerate(r) if v})
    if ncols is None:
        ncols = 0
        for r in A:
            ncols = max(ncols, (max(r) + 1 if r else 0) if isinstance(r, dict) else len(r))
    return rows, ncols


def _column_order(ncols: int, pivot_order: str) -> list:
    if pivot_order == "lex":
        return list(range(ncols))
    if pivot_order == "revlex":
        return list(range(ncols - 1, -1, -1))
    raise LinAlgError(f"unknown pivot order {pivot_order!r}")


def row_reduce(rows: list, ncols: int, pivot_order="lex", track=False):
    """Reduced row echelon form.

    Returns (reduced rows, pivot columns, transforms) where transforms[r] is the
    combination of original rows producing reduced row r (when ``track``).
    """
    rows = [dict(r) for r in rows]
    trans = [{i: Fraction(1)} for i in range(len(rows))] if track else None
    pivots = []
    r0 = 0
    for col in _column_order(ncols, pivot_order):
        piv = None
        for r in range(r0, len(rows)):
            if rows[r].get(col):
                piv = r
                break
        if piv is None:
            continue
        rows[r0], rows[piv] = rows[piv], rows[r0]
        if track:
            trans[r0], trans[piv] = trans[piv], trans[r0]
        inv = 1 / rows[r0][col]
        rows[r0] = {c: v * inv for c, v in rows[r0].items()}
        if track:
            trans[r0] = {c: v * inv for c, v in trans[r0].items()}
        prow = rows[r0]
        for r in range(len(rows)):
            if r != r0:
                f = rows[r].get(col)
                if f:
                    rows[r] = vadd(rows[r], prow, -f)
                    if track:
                        trans[r] = vadd(trans[r], trans[r0], -f)
        pivots.append(col)
        r0 += 1
    return rows, pivots, trans


def solve_linear(A, b, ncols=None, pivot_order="lex"):
    """Solve A x = b exactly.

    ``A`` is a list of rows (dense lists or sparse dicts).  Returns a
    :class:`Solution` (free variables set to zero under the pivot order) or an
    :class:`Inconsistent` certificate.
    """
    rows, ncols = _as_rows(A, ncols)
    b = [frac(v) for v in b]
    if len(b) != len(rows):
        raise LinAlgError(f"dimension mismatch: {len(rows)} rows but rhs of length {len(b)}")
    aug = ncols
    for r, v in zip(rows, b):
        if v:
            r[aug] = v
    red, pivots, trans = row_reduce(rows, ncols, pivot_order, track=True)
    for r in range(len(pivots), len(red)):
        if red[r].get(aug):
            y = [Fraction(0)] * len(rows)
            for i, c in trans[r].items():
                y[i] = c
            return Inconsistent(y, red[r][aug])
    x = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        x[col] = red[r].get(aug, Fraction(0))
    return Solution(x)


def mat_vec(rows: list, x) -> list:
    return [sum((c * x[j] for j, c in r.items()), Fraction(0)) for r in rows]


def rank(rows: list, ncols: int) -> int:
    return len(row_reduce(rows, ncols)[1])


def nullspace(rows: list, ncols: int, pivot_order="lex") -> list:
    """Basis of {x : A x = 0} as sparse vectors."""
    red, pivots, _ = row_reduce(rows, ncols, pivot_order)
    pset = set(pivots)
    basis = []
    for free in _column_order(ncols, pivot_order):
        if free in pset:
            continue
        v = {free: Fraction(1)}
        for r, col in enumerate(pivots):
            c = red[r].get(free)
            if c:
                v[col] = -c
        basis.append(v)
    return basis


def column_space(rows: list, ncols: int) -> list:
    """Basis (sparse, over the row index) of the column span of A."""
    nrows = len(rows)
    cols = [dict() for _ in range(ncols)]
    for i, r in enumerate(rows):
        for j, c in r.items():
            cols[j][i] = c
    red, pivots, _ = row_reduce(cols, nrows)
    return [r for r in red[: len(pivots)]]


# ---------------------------------------------------------------------------
# cohomology


@dataclass
class Cohomology:
    degree: int
    dimension: int
    representatives: list  # cocycles as sparse vectors over the full space
    _cycles_idx: list = field(repr=False, default_factory=list)
    _boundaries: list = field(repr=False, default_factory=list)

    def project(self, z: Vec) -> list:
        """Coordinates of the class of the cocycle ``z`` against the representatives."""
        gens = self.representatives + self._boundaries
        idx = self._cycles_idx
        pos = {i: r for r, i in enumerate(idx)}
        A = [dict() for _ in idx]
        for j, g in enumerate(gens):
            for i, c in g.items():
                A[pos[i]][j] = c
        b = [Fraction(0)] * len(idx)
        for i, c in z.items():
            if i not in pos:
                raise LinAlgError("vector is not supported in the cohomology degree")
            b[pos[i]] = c
        sol = solve_linear(A, b, ncols=len(gens))
        if isinstance(sol, Inconsistent):
            raise LinAlgError("vector is not a cocycle")
        return sol.x[: self.dimension]


def cohomology(C: ChainComplex, d: int) -> Cohomology:
    sp = C.space
    deg_d = sp.indices(degree=d)
    deg_up = sp.indices(degree=d + 1)
    deg_down = sp.indices(degree=d - 1)
    out_rows = C.differential.rows(deg_up, deg_d)
    cycles = [{deg_d[j]: c for j, c in v.items()} for v in nullspace(out_rows, len(deg_d))]
    in_rows = C.differential.rows(deg_d, deg_down)
    bnd = [{deg_d[j]: c for j, c in v.items()} for v in column_space(in_rows, len(deg_down))]
    # greedy complement of the boundaries inside the cycles
    reps = []
    pos = {i: r for r, i in enumerate(deg_d)}

    def rk(vs):
        cols = [dict() for _ in deg_d]
        for j, v in enumerate(vs):
            for i, c in v.items():
                cols[pos[i]][j] = c
        return rank(cols, len(vs))

    current = list(bnd)
    base = rk(current)
    for z in cycles:
        r = rk(current + [z])
        if r > base:
            reps.append(z)
            current.append(z)
            base = r
    assert len(reps) == len(cycles) - len(bnd)
    return Cohomology(d, len(reps), reps, deg_d, bnd)


def _cone(f: GradedMap, C: ChainComplex, D: ChainComplex) -> ChainComplex:
    """Mapping cone: C[1] (+) D with differential (x, y) -> (-dx, f x + dy)."""
    n = C.space.dim
    names = tuple(("c", x) for x in C.space.names) + tuple(("d", y) for y in D.space.names)
    degs = tuple(d - 1 for d in C.space.degrees) + D.space.degrees
    wts = C.space.weights + D.space.weights
    sp = GradedSpace(names, degs, wts)
    e = {}
    for (t, s), c in C.differential.entries.items():
        e[(t, s)] = -c
    for (t, s), c in f.entries.items():
        e[(n + t, s)] = e.get((n + t, s), 0) + c
    for (t, s), c in D.differential.entries.items():
        e[(n + t, n + s)] = c
    return ChainComplex(sp, GradedMap(sp, sp, 1, {k: v for k, v in e.items() if v}))


def is_acyclic(C: ChainComplex) -> bool:
    sp = C.space
    for d in sp.degree_range():
        rows_out = C.differential.rows(sp.indices(degree=d + 1), sp.indices(degree=d))
        rows_in = C.differential.rows(sp.indices(degree=d), sp.indices(degree=d - 1))
        ker = len(sp.indices(degree=d)) - rank(rows_out, len(sp.indices(degree=d)))
        im = rank(rows_in, len(sp.indices(degree=d - 1)))
        if ker != im:
            return False
    return True


def _check_filtered_chain_map(f: GradedMap, C: ChainComplex, D: ChainComplex):
    if f.degree != 0 or f.source != C.space or f.target != D.space:
        raise LinAlgError("expected a degree 0 map between the given complexes")
    if not f.is_weight_preserving():
        raise LinAlgError("map does not preserve the filtration")
    if D.differential.compose(f).entries != f.compose(C.differential).entries:
        raise LinAlgError("map is not a chain map")


def _restrict_map(f: GradedMap, n: int, C: ChainComplex, D: ChainComplex):
    Cn, Dn = C.restrict_weight(n), D.restrict_weight(n)
    si = {i: k for k, i in enumerate(C.space.indices(min_weight=n))}
    ti = {i: k for k, i in enumerate(D.space.indices(min_weight=n))}
    e = {(ti[t], si[s]): c for (t, s), c in f.entries.items() if s in si}
    return GradedMap(Cn.space, Dn.space, 0, e), Cn, Dn


def is_quasi_iso_on_filtration(f: GradedMap, C: ChainComplex, D: ChainComplex) -> bool:
    """True iff f|F_n is a quasi-isomorphism for every n >= 1."""
    _check_filtered_chain_map(f, C, D)
    top = max(C.space.max_weight(), D.space.max_weight())
    for n in range(1, top + 1):
        fn, Cn, Dn = _restrict_map(f, n, C, D)
        if not is_acyclic(_cone(fn, Cn, Dn)):
            return False
    return True


def is_surjective_on_filtration(f: GradedMap, C: ChainComplex, D: ChainComplex) -> bool:
    """True iff f|F_n : F_n C -> F_n D is onto for every n >= 1."""
    _check_filtered_chain_map(f, C, D)
    top = max(C.space.max_weight(), D.space.max_weight())
    for n in range(1, top + 1):
        fn, Cn, Dn = _restrict_map(f, n, C, D)
        if rank(fn.rows(range(Dn.space.dim), range(Cn.space.dim)), Cn.space.dim) != Dn.space.dim:
            return False
    return True
