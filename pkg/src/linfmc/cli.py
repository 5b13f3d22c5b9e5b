"""Command line interface: ``linfmc <command> FILE [options]``.

Exit codes: 0 success, 1 a validation check failed, 2 the problem is
infeasible (an obstruction or a failed search), 3 malformed input.
Output is canonical JSON (sorted keys, rationals as strings) so two runs with
the same arguments produce identical bytes.
"""
from __future__ import annotations

import argparse
import random
import sys

from . import serialize as ser
from .sullivan_forms import FormError, PolyForm, render
from .gradedlinalg import LinAlgError, cohomology
from .htt import (TransferError, classify_piB, connect_solutions, cyl_curvature, transfer)
from .linfty_core import LInftyError, check_linfty, check_morphism, classify_morphism, curv, twist
from .mc_simplicial import (LiftError, Simplex, SimplicialError, connect_by_edge, eface,
                         fill_horn_nilpotent, kan_fibration_lift, tcurv)

OK, INVALID, INFEASIBLE, MALFORMED = 0, 1, 2, 3


class Malformed(Exception):
    pass


def _pick(table: dict, name, what: str):
    if name is None:
        if len(table) != 1:
            raise Malformed(f"the file declares {len(table)} {what}s; choose one with --{what}")
        name = next(iter(table))
    if name not in table:
        raise Malformed(f"undeclared {what} {name!r}")
    return name, table[name]


def _named_residual(space, x: dict) -> dict:
    return {space.names[i]: ser.qs(c) if not hasattr(c, "terms") else render(c) for i, c in sorted(x.items())}


def _violations(report) -> list:
    return [str(v) for v in report.violations]


# ---------------------------------------------------------------------------
# commands


def cmd_check(doc: ser.Document, args) -> tuple:
    out = {"algebras": {}, "morphisms": {}, "mc": {}, "simplices": {}, "solutions": {}}
    ok = True
    for name, L in doc.algebras.items():
        r = check_linfty(L)
        out["algebras"][name] = {"ok": r.ok, "checked": r.checked, "violations": _violations(r)}
        ok &= r.ok
    for name, (_, _, F) in doc.morphisms.items():
        r = check_morphism(F)
        out["morphisms"][name] = {"ok": r.ok, "checked": r.checked, "violations": _violations(r)}
        ok &= r.ok
    for name, (an, x) in doc.mc.items():
        L = doc.algebras[an]
        c = curv(L, x)
        out["mc"][name] = {"ok": not c, "curvature": _named_residual(L.space, c)}
        ok &= not c
    for name, (an, s) in doc.simplices.items():
        L = doc.algebras[an]
        c = tcurv(L, s.value)
        out["simplices"][name] = {"ok": not c, "curvature": _named_residual(L.space, c)}
        ok &= not c
    for name, (_, t) in doc.solutions.items():
        cert = cyl_curvature(t)
        res = [str(v) for v in cert.A + cert.F + cert.B]
        out["solutions"][name] = {"ok": cert.zero, "violations": res}
        ok &= cert.zero
    return {k: v for k, v in out.items() if v}, (OK if ok else INVALID)


def _shift_forms(space, raw: dict, alpha: dict, n: int) -> dict:
    x = ser.form_vec_from(space, raw, n)
    for i, c in alpha.items():
        x[i] = x.get(i, PolyForm.zero(n)) - PolyForm.const(n, c)
    return ser.form_vec_json(space, {i: c for i, c in x.items() if c})


def cmd_twist(doc: ser.Document, args) -> tuple:
    """The input document with L replaced by L^α.

    Everything living in L is moved along β -> β - α (MC elements, simplices,
    horns), which is the bijection MC(L) = MC(L^α).  Declarations that would
    need a twisted morphism are dropped when α != 0.  The check report of the
    twisted algebra goes to ``--certificate`` so that twisting by 0 returns
    the input unchanged.
    """
    an, L = _pick(doc.algebras, args.algebra, "algebra")
    if args.element is not None:
        import json
        try:
            alpha = L.space.vector({k: ser.q(v) for k, v in json.loads(args.element).items()})
        except (ValueError, AttributeError) as exc:
            raise Malformed(f"bad --element: {exc}") from None
    else:
        mcs = {k: v for k, v in doc.mc.items() if v[0] == an}
        _, (_, alpha) = _pick(mcs, args.mc, "mc")
    c = curv(L, alpha)
    if c:
        return {"error": "not a Maurer–Cartan element", "curvature": _named_residual(L.space, c)}, INVALID
    La = twist(L, alpha)
    r = check_linfty(La)
    args.certificate_doc = {"format": ser.FORMAT, "algebra": an, "twisted_by": ser.vec_json(L.space, alpha),
                            "ok": r.ok, "checked": r.checked, "violations": _violations(r)}
    out = {k: v for k, v in doc.raw.items() if k != "certificate"}
    out["format"] = ser.FORMAT
    out["algebras"] = {**doc.raw["algebras"], an: ser.algebra_json(La)}
    if alpha:
        raw = doc.raw
        sp = L.space
        if "mc" in raw:
            out["mc"] = {k: v if v["algebra"] != an else {"algebra": an, "value": ser.vec_json(sp, {
                i: d for i in set(doc.mc[k][1]) | set(alpha) if (d := doc.mc[k][1].get(i, 0) - alpha.get(i, 0))})}
                for k, v in raw["mc"].items()}
        if "simplices" in raw:
            out["simplices"] = {k: v if v["algebra"] != an else
                                {**v, "value": _shift_forms(sp, v["value"], alpha, int(v["n"]))}
                                for k, v in raw["simplices"].items()}
        if "horns" in raw:
            out["horns"] = {k: v if v["algebra"] != an else
                            {**v, "faces": {i: _shift_forms(sp, f, alpha, int(v["m"]) - 1)
                                            for i, f in v["faces"].items()}}
                            for k, v in raw["horns"].items()}
        dropped = {k for k, v in raw.get("morphisms", {}).items() if an in (v["source"], v["target"])}
        out["morphisms"] = {k: v for k, v in raw.get("morphisms", {}).items() if k not in dropped}
        out["lifts"] = {k: v for k, v in raw.get("lifts", {}).items() if v["morphism"] not in dropped}
        maps = {k for k, v in raw.get("maps", {}).items() if v["target"] == an}
        out["maps"] = {k: v for k, v in raw.get("maps", {}).items() if k not in maps}
        trs = {k for k, v in raw.get("transfers", {}).items() if v["algebra"] == an}
        out["transfers"] = {k: v for k, v in raw.get("transfers", {}).items() if k not in trs}
        out["solutions"] = {k: v for k, v in raw.get("solutions", {}).items() if v["transfer"] not in trs}
        out = {k: v for k, v in out.items() if v or k in raw}
    return out, (OK if r.ok else INVALID)


def _simplex_cert(L, s: Simplex, faces: dict) -> dict:
    return {
        "curvature": _named_residual(L.space, tcurv(L, s.value)),
        "face_residuals": {str(i): _named_residual(L.space, {j: c for j, c in
                                                             _esub(eface(s.value, i), f.value).items()})
                           for i, f in sorted(faces.items())},
    }


def _esub(a: dict, b: dict) -> dict:
    out = {}
    for i in set(a) | set(b):
        c = a.get(i, 0) - b.get(i, 0) if i in a and i in b else (a[i] if i in a else -b[i])
        if c:
            out[i] = c
    return out


def cmd_fill_horn(doc: ser.Document, args) -> tuple:
    hn, (an, h) = _pick(doc.horns, args.horn, "horn")
    L = doc.algebras[an]
    rng = random.Random(args.seed) if args.seed is not None else None
    try:
        s = fill_horn_nilpotent(L, h, rng)
    except LiftError as exc:
        return {"error": str(exc), "weight": exc.weight, "degree": exc.degree}, INFEASIBLE
    cert = _simplex_cert(L, s, h.faces)
    return {"algebras": {an: ser.algebra_json(L)},
            "simplices": {f"{hn}_filler": {"algebra": an, "n": s.n, "value": ser.form_vec_json(L.space, s.value)}},
            "certificate": cert}, OK


def cmd_lift(doc: ser.Document, args) -> tuple:
    ln, (mn, h, b) = _pick(doc.lifts, args.lift, "lift")
    sn, tn, F = doc.morphisms[mn]
    if not classify_morphism(F).fibration:
        return {"error": f"{mn} is not a fibration"}, INFEASIBLE
    try:
        res = kan_fibration_lift(F, h, b, check_fibration=False)
    except LiftError as exc:
        return {"error": str(exc), "weight": exc.weight, "degree": exc.degree}, INFEASIBLE
    s = res.simplex
    cert = _simplex_cert(F.source, s, h.faces if h else {})
    cert["image_residual"] = _named_residual(F.target.space, _esub(F.data().pushforward(s.value), b.value))
    cert["tower"] = [{"weight": r.weight, "eta_zero": r.eta_zero, "eta_closed": r.eta_closed,
                      "eta_vanishes_on_horn": r.eta_vanishes_on_horn, "lambda_zero": r.lambda_zero}
                     for r in res.records]
    return {"algebras": {sn: ser.algebra_json(F.source)},
            "simplices": {f"{ln}_lift": {"algebra": sn, "n": s.n, "value": ser.form_vec_json(F.source.space, s.value)}},
            "certificate": cert}, OK


def cmd_transfer(doc: ser.Document, args) -> tuple:
    tn, (B, A, phi, cap) = _pick(doc.transfers, args.transfer, "transfer")
    cap = args.arity_cap or cap
    res = transfer(B, A, phi, arity_cap=cap, pivot_order=args.pivot_order)
    if not res.ok:
        ob = res.obstruction
        return {"obstruction": {
            "arity": ob.arity, "degree": ob.degree, "value": ser.qs(ob.value),
            "equations": [list(e[:1]) + [list(e[1]), e[2]] for e in ob.equations],
            "certificate": [ser.qs(y) for y in ob.certificate]},
            "quasi_isomorphism": res.quasi_iso}, INFEASIBLE
    cert = cyl_curvature(res.triple)
    out = dict(doc.raw)
    out.pop("certificate", None)
    out["solutions"] = {**doc.raw.get("solutions", {}), f"{tn}_{args.pivot_order}": ser.solution_json(res.triple, tn)}
    if args.arity_cap:
        out["transfers"] = {**doc.raw["transfers"], tn: {**doc.raw["transfers"][tn], "arity_cap": cap}}
    out["certificate"] = {"zero": cert.zero, "violations": [str(v) for v in cert.A + cert.F + cert.B],
                          "stages": res.stages, "quasi_isomorphism": res.quasi_iso}
    return out, OK


def cmd_connect(doc: ser.Document, args) -> tuple:
    if args.solutions:
        n0, n1 = args.solutions
        (_, t0), (_, t1) = _pick(doc.solutions, n0, "solution")[1], _pick(doc.solutions, n1, "solution")[1]
        res = connect_solutions(t0, t1, arity_cap=args.arity_cap, pivot_order=args.pivot_order)
        if not res.ok:
            return {"found": False, "arity": res.arity, "message": res.message}, INFEASIBLE
        e = res.edge
        A, B = t0.A.space, t0.B.space
        edge = {"Q_A": [{"args": [A.names[i] for i in w], "value": ser.form_vec_json(A, v)}
                        for m in sorted(e.q) for w, v in sorted(e.q[m].items())],
                "F": [{"args": [A.names[i] for i in w], "value": ser.form_vec_json(B, v)}
                      for m in sorted(e.f) for w, v in sorted(e.f[m].items())]}
        return {"found": True, "edge": edge, "degenerate": e.is_degenerate(),
                "certificate": {"residuals": len(e.residuals())}}, OK
    if not args.mc:
        raise Malformed("connect needs --mc A B or --solutions S T")
    (an0, a0), (an1, a1) = _pick(doc.mc, args.mc[0], "mc")[1], _pick(doc.mc, args.mc[1], "mc")[1]
    if an0 != an1:
        raise Malformed("the two MC elements live in different algebras")
    L = doc.algebras[an0]
    for x in (a0, a1):
        if curv(L, x):
            return {"found": False, "message": "endpoint is not Maurer–Cartan"}, INVALID
    res = connect_by_edge(L, a0, a1)
    if not res.found:
        return {"found": False, "weight": res.weight, "max_poly_degree": res.max_poly_degree,
                "message": res.message}, INFEASIBLE
    s = res.edge
    return {"found": True, "algebras": {an0: ser.algebra_json(L)},
            "simplices": {"edge": {"algebra": an0, "n": 1, "value": ser.form_vec_json(L.space, s.value)}},
            "certificate": {"curvature": _named_residual(L.space, tcurv(L, s.value)),
                            "vertex_residuals": [_named_residual(L.space, _esub(s.vertex_value(v), {i: c for i, c in a.items()}))
                                                 for v, a in ((0, a0), (1, a1))]}}, OK


def cmd_report(doc: ser.Document, args) -> tuple:
    out = {"algebras": {}, "morphisms": {}, "transfers": {}}
    for name, L in doc.algebras.items():
        C = L.chain_complex()
        degs = sorted(set(L.space.degrees))
        out["algebras"][name] = {
            "dimension": L.space.dim, "depth": L.depth, "arity_cap": L.arity_cap, "abelian": L.is_abelian(),
            "dims": {str(d): len(L.space.indices(degree=d)) for d in degs},
            "cohomology": {str(d): cohomology(C, d).dimension for d in degs},
        }
    for name, (_, _, F) in doc.morphisms.items():
        c = classify_morphism(F)
        out["morphisms"][name] = {"weak_equivalence": c.weak_equivalence, "fibration": c.fibration,
                                  "acyclic_fibration": c.acyclic_fibration}
    for name, (B, A, phi, cap) in doc.transfers.items():
        c = classify_piB(A, B, phi, args.arity_cap or cap)
        out["transfers"][name] = {"piB_weak_equivalence": c.weak_equivalence, "piB_fibration": c.fibration}
    return {k: v for k, v in out.items() if v}, OK


def cmd_corpus(doc, args) -> tuple:
    from . import corpus
    from .serialize import algebra_json, complex_json, map_json, morphism_json
    out = {"format": ser.FORMAT, "algebras": {}, "morphisms": {}}
    for name in corpus.ALGEBRAS:
        out["algebras"][name] = algebra_json(corpus.algebra(name))
    F = corpus.fib_morphism()
    out["morphisms"]["fib"] = morphism_json(F, "fib_source", "fib_target")
    out["complexes"] = {"htt_A": complex_json(corpus.htt_A()), "htt_A5": complex_json(corpus.htt_A5()),
                        "htt_A_broken": complex_json(corpus.htt_A_broken())}
    out["maps"] = {"htt_phi": map_json(corpus.htt_phi(), "htt_A", "htt_B"),
                   "htt_phi5": map_json(corpus.htt_phi5(), "htt_A5", "htt_B5"),
                   "htt_phi_broken": map_json(corpus.htt_phi_broken(), "htt_A_broken", "htt_B")}
    out["transfers"] = {"htt": {"algebra": "htt_B", "complex": "htt_A", "map": "htt_phi", "arity_cap": 4},
                        "htt5": {"algebra": "htt_B5", "complex": "htt_A5", "map": "htt_phi5", "arity_cap": 4},
                        "htt_broken": {"algebra": "htt_B", "complex": "htt_A_broken", "map": "htt_phi_broken",
                                       "arity_cap": 4}}
    return out, OK


COMMANDS = {
    "check": cmd_check, "twist": cmd_twist, "fill-horn": cmd_fill_horn, "lift": cmd_lift,
    "transfer": cmd_transfer, "connect": cmd_connect, "report": cmd_report, "corpus": cmd_corpus,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linfmc", description="Exact computations with filtered L∞-algebras.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("file", nargs="?", help="problem file (JSON); '-' reads stdin")
    p.add_argument("--arity-cap", type=int, default=None, help="transfer/connect/report: highest arity solved")
    p.add_argument("--truncation-depth", type=int, default=None,
                   help="truncate every algebra at this depth N (weights >= N dropped)")
    p.add_argument("--pivot-order", choices=("lex", "revlex"), default="lex",
                   help="free-variable order in the exact solves (default lex)")
    p.add_argument("--seed", type=int, default=None, help="fill-horn/lift: seed for random fillers")
    p.add_argument("--out", default=None, help="write the result here instead of stdout")
    p.add_argument("--algebra", help="name of the algebra to act on when the file has several")
    p.add_argument("--mc", nargs="+", help="twist: MC element name; connect: two MC element names")
    p.add_argument("--element", help="inline MC element for twist, e.g. '{\"x\": \"1\"}'")
    p.add_argument("--horn", help="fill-horn: horn name")
    p.add_argument("--lift", help="lift: lifting problem name")
    p.add_argument("--transfer", help="transfer/report: transfer problem name")
    p.add_argument("--solutions", nargs=2, help="connect: two transfer solution names")
    p.add_argument("--certificate", help="twist: write the check report of the twisted algebra here")
    return p


def run(argv=None) -> tuple:
    """Run a command; returns (exit code, output text, output path or None)."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return (OK if exc.code == 0 else MALFORMED), "", None
    try:
        if args.arity_cap is not None and args.arity_cap < 1:
            raise Malformed("--arity-cap must be >= 1")
        if args.truncation_depth is not None and args.truncation_depth < 2:
            raise Malformed("--truncation-depth must be >= 2")
        if args.command == "corpus":
            doc = None
        else:
            if args.file is None:
                raise Malformed("missing problem file")
            if args.file == "-":
                text = sys.stdin.read()
            else:
                try:
                    with open(args.file, encoding="utf-8") as fh:
                        text = fh.read()
                except OSError as exc:
                    raise Malformed(str(exc)) from None
            doc = ser.load(text, args.truncation_depth)
        if args.mc is not None and args.command == "twist" and len(args.mc) == 1:
            args.mc = args.mc[0]
        args.certificate_doc = None
        result, code = COMMANDS[args.command](doc, args)
        if args.certificate and args.certificate_doc is not None:
            with open(args.certificate, "w", encoding="utf-8") as fh:
                fh.write(ser.dumps(args.certificate_doc))
    except (Malformed, ser.FormatError, LInftyError, LinAlgError, FormError, SimplicialError,
            TransferError) as exc:
        return MALFORMED, ser.dumps({"error": str(exc), "kind": type(exc).__name__}), None
    if "format" not in result:
        result = {"format": ser.FORMAT, **result}
    return code, ser.dumps(result), args.out


def main(argv=None) -> int:
    code, text, out = run(argv)
    if out and text and code != MALFORMED:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif text:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
