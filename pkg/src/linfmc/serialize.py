"""JSON problem files.

Rationals are strings ("-3/2"), forms use the text grammar of
:func:`linfmc.sullivan_forms.render`, basis elements are referred to by name.  A file
is an object with optional sections::

    {"format": "linfmc/1",
     "algebras":   {name: {"basis": [[name, degree, weight], ...],
                           "differential": {x: {y: "c"}},
                           "brackets": [{"args": [x, ...], "value": {y: "c"}}],
                           "arity_cap": int, "depth": int | null}},
     "complexes":  {name: {"basis": [...], "differential": {...}}},
     "maps":       {name: {"source": complex, "target": algebra, "entries": {x: {y: "c"}}}},
     "morphisms":  {name: {"source": algebra, "target": algebra,
                           "components": [{"args": [...], "value": {...}}], "arity_cap": int}},
     "mc":         {name: {"algebra": algebra, "value": {x: "c"}}},
     "simplices":  {name: {"algebra": algebra, "n": int, "value": {x: form}}},
     "horns":      {name: {"algebra": algebra, "m": int, "k": int, "faces": {"i": {x: form}}}},
     "lifts":      {name: {"morphism": morphism, "m": int, "k": int | null,
                           "faces": {"i": {x: form}}, "target": {x: form}}},
     "transfers":  {name: {"algebra": algebra, "complex": complex, "map": map, "arity_cap": int}},
     "solutions":  {name: {"transfer": transfer, "Q_A": [...], "F": [...]}}}

Anything else (for instance a ``certificate`` written by a command) is
carried along but not interpreted.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .sullivan_forms import parse, render
from .gradedlinalg import ChainComplex, GradedMap, GradedSpace
from .linfty_core import InftyMorphism, LInftyAlgebra

FORMAT = "linfmc/1"

SECTIONS = ("algebras", "complexes", "maps", "morphisms", "mc", "simplices", "horns", "lifts",
            "transfers", "solutions")


class FormatError(ValueError):
    pass


def q(x) -> Fraction:
    if isinstance(x, bool):
        raise FormatError(f"not a rational: {x!r}")
    if isinstance(x, (int, str)):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            pass
    raise FormatError(f"not a rational: {x!r}")


def qs(c: Fraction) -> str:
    return str(c)


def _named_vec(space: GradedSpace, raw: dict) -> dict:
    return space.vector({k: q(v) for k, v in _entries(raw).items()})


def _entries(raw) -> dict:
    if not isinstance(raw, dict):
        raise FormatError("expected an object")
    return raw


# ---------------------------------------------------------------------------
# to JSON


def algebra_json(L: LInftyAlgebra) -> dict:
    sp = L.space
    return {
        "basis": [[n, d, w] for n, d, w in zip(sp.names, sp.degrees, sp.weights)],
        "differential": {sp.names[i]: {sp.names[o]: qs(c) for o, c in sorted(v.items())}
                         for i, v in sorted(L.differential.items())},
        "brackets": [{"args": list(L.word_names(k)), "value": {sp.names[o]: qs(c) for o, c in sorted(v.items())}}
                     for m in sorted(L.brackets) for k, v in sorted(L.brackets[m].items())],
        "arity_cap": L.arity_cap,
        "depth": L.depth,
    }


def complex_json(C: ChainComplex) -> dict:
    sp = C.space
    cols = {}
    for (t, s), c in sorted(C.differential.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        cols.setdefault(sp.names[s], {})[sp.names[t]] = qs(c)
    return {"basis": [[n, d, w] for n, d, w in zip(sp.names, sp.degrees, sp.weights)], "differential": cols}


def map_json(f: GradedMap, source: str, target: str) -> dict:
    cols = {}
    for (t, s), c in sorted(f.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        cols.setdefault(f.source.names[s], {})[f.target.names[t]] = qs(c)
    return {"source": source, "target": target, "entries": cols}


def morphism_json(F: InftyMorphism, source: str, target: str) -> dict:
    tn = F.target.space.names
    return {
        "source": source, "target": target, "arity_cap": F.arity_cap,
        "components": [{"args": list(F.source.word_names(k)), "value": {tn[o]: qs(c) for o, c in sorted(v.items())}}
                       for m in sorted(F.components) for k, v in sorted(F.components[m].items())],
    }


def vec_json(space: GradedSpace, x: dict) -> dict:
    return {space.names[i]: qs(c) for i, c in sorted(x.items())}


def form_vec_json(space: GradedSpace, x: dict) -> dict:
    return {space.names[i]: render(c) for i, c in sorted(x.items())}


def table_json(A: GradedSpace, out: GradedSpace, table: dict) -> list:
    return [{"args": [A.names[i] for i in w], "value": {out.names[o]: qs(c) for o, c in sorted(v.items())}}
            for m in sorted(table) for w, v in sorted(table[m].items())]


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# from JSON


def algebra_from(raw: dict, depth_override=None) -> LInftyAlgebra:
    """Build an algebra; ``depth_override`` truncates further (never extends)."""
    basis = [(str(n), int(d), int(w)) for n, d, w in raw.get("basis", [])]
    diff = {x: {k: q(c) for k, c in _entries(v).items()} for x, v in _entries(raw.get("differential", {})).items()}
    br = {}
    for item in raw.get("brackets", []):
        key = tuple(item["args"])
        if key in br:
            raise FormatError(f"bracket on {key} given twice")
        br[key] = {k: q(c) for k, c in _entries(item["value"]).items()}
    depth = raw.get("depth")
    L = LInftyAlgebra.build(basis, differential=diff, brackets=br, arity_cap=raw.get("arity_cap"), depth=depth)
    if depth_override is not None and (depth is None or depth_override < depth):
        from .linfty_core import _sub_algebra
        keep = [i for i in range(L.space.dim) if L.space.weights[i] < depth_override]
        L = _sub_algebra(L, keep, depth_override, "")
    return L


def complex_from(raw: dict) -> ChainComplex:
    sp = GradedSpace.from_basis([(str(n), int(d), int(w)) for n, d, w in raw.get("basis", [])])
    cols = {}
    for x, v in _entries(raw.get("differential", {})).items():
        cols[sp.index(x)] = _named_vec(sp, v)
    return ChainComplex(sp, GradedMap.from_columns(sp, sp, 1, cols))


def form_vec_from(space: GradedSpace, raw: dict, n: int) -> dict:
    out = {}
    for k, v in _entries(raw).items():
        i = space.index(k)
        f = parse(str(v), n)
        if f:
            out[i] = f
    return out


@dataclass
class Document:
    raw: dict
    algebras: dict = field(default_factory=dict)
    complexes: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    mc: dict = field(default_factory=dict)        # name -> (algebra name, element)
    simplices: dict = field(default_factory=dict)  # name -> Simplex
    horns: dict = field(default_factory=dict)
    lifts: dict = field(default_factory=dict)
    transfers: dict = field(default_factory=dict)
    solutions: dict = field(default_factory=dict)


def _ref(table: dict, name, what: str):
    if name not in table:
        raise FormatError(f"undeclared {what} {name!r}")
    return table[name]


def load(text: str, depth_override=None) -> Document:
    """Parse and validate a problem file (structural validation only)."""
    from .htt import CylTriple
    from .mc_simplicial import HornData, Simplex

    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise FormatError("top level must be an object")
    fmt = raw.get("format", FORMAT)
    if fmt != FORMAT:
        raise FormatError(f"unsupported format {fmt!r}")
    doc = Document(raw)

    def cut(space, vals):
        # under --truncation-depth, components on deleted basis elements are projected away
        vals = _entries(vals)
        if depth_override is None:
            return vals
        return {k: v for k, v in vals.items() if k in space._index}
    try:
        for name, a in raw.get("algebras", {}).items():
            L = algebra_from(a, depth_override)
            L.name = name
            doc.algebras[name] = L
        for name, c in raw.get("complexes", {}).items():
            doc.complexes[name] = complex_from(c)
        for name, m in raw.get("maps", {}).items():
            src = _ref(doc.complexes, m["source"], "complex")
            tgt = _ref(doc.algebras, m["target"], "algebra")
            cols = {src.space.index(x): _named_vec(tgt.space, cut(tgt.space, v))
                    for x, v in _entries(m["entries"]).items()}
            doc.maps[name] = (m["source"], m["target"], GradedMap.from_columns(src.space, tgt.space, 0, cols))
        for name, m in raw.get("morphisms", {}).items():
            S = _ref(doc.algebras, m["source"], "algebra")
            T = _ref(doc.algebras, m["target"], "algebra")
            comps = {tuple(it["args"]): {k: q(c) for k, c in _entries(it["value"]).items()}
                     for it in m.get("components", [])}
            comps = {k: {o: c for o, c in v.items() if o in T.space._index} for k, v in comps.items()
                     if all(a in S.space._index for a in k)} if (depth_override is not None) else comps
            F = InftyMorphism.build(S, T, comps, m.get("arity_cap"), name)
            doc.morphisms[name] = (m["source"], m["target"], F)
        for name, m in raw.get("mc", {}).items():
            L = _ref(doc.algebras, m["algebra"], "algebra")
            doc.mc[name] = (m["algebra"], _named_vec(L.space, cut(L.space, m["value"])))
        for name, s in raw.get("simplices", {}).items():
            L = _ref(doc.algebras, s["algebra"], "algebra")
            n = int(s["n"])
            doc.simplices[name] = (s["algebra"], Simplex(L, n, form_vec_from(L.space, cut(L.space, s["value"]), n),
                                                                 verify=False))
        for name, h in raw.get("horns", {}).items():
            L = _ref(doc.algebras, h["algebra"], "algebra")
            m, k = int(h["m"]), int(h["k"])
            faces = {int(i): Simplex(L, m - 1, form_vec_from(L.space, cut(L.space, v), m - 1), verify=False)
                     for i, v in _entries(h["faces"]).items()}
            doc.horns[name] = (h["algebra"], HornData(m, k, faces))
        for name, p in raw.get("lifts", {}).items():
            _, _, F = _ref(doc.morphisms, p["morphism"], "morphism")
            m = int(p["m"])
            k = p.get("k")
            horn = None
            if m > 0:
                faces = {int(i): Simplex(F.source, m - 1, form_vec_from(F.source.space, cut(F.source.space, v), m - 1),
                                         verify=False)
                         for i, v in _entries(p["faces"]).items()}
                horn = HornData(m, int(k), faces)
            target = Simplex(F.target, m, form_vec_from(F.target.space, cut(F.target.space, p["target"]), m),
                             verify=False)
            doc.lifts[name] = (p["morphism"], horn, target)
        for name, t in raw.get("transfers", {}).items():
            B = _ref(doc.algebras, t["algebra"], "algebra")
            A = _ref(doc.complexes, t["complex"], "complex")
            _, _, phi = _ref(doc.maps, t["map"], "map")
            doc.transfers[name] = (B, A, phi, int(t.get("arity_cap", 4)))
        for name, s in raw.get("solutions", {}).items():
            B, A, phi, cap = _ref(doc.transfers, s["transfer"], "transfer")

            def tab(items, out):
                res = {}
                for it in items:
                    w = tuple(A.space.index(a) for a in it["args"])
                    res.setdefault(len(w), {})[w] = _named_vec(out, cut(out, it["value"]))
                return res
            doc.solutions[name] = (s["transfer"], CylTriple(A, B, phi, tab(s.get("Q_A", []), A.space),
                                                            tab(s.get("F", []), B.space), cap))
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"malformed entry: {exc!r}") from None
    return doc


def solution_json(t, transfer: str) -> dict:
    return {"transfer": transfer, "Q_A": table_json(t.A.space, t.A.space, t.q),
            "F": table_json(t.A.space, t.B.space, t.f)}
