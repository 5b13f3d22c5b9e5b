import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from linfmc import corpus
from linfmc import serialize as ser
from linfmc.cli import run
from linfmc.linfty_core import quotient_tower


def jrun(*argv):
    code, text, _ = run([str(a) for a in argv])
    return code, (json.loads(text) if text else None), text


def write(tmp_path, doc, name="p.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else ser.dumps(doc))
    return p


# check


def test_check_corpus(fixtures):
    code, out, _ = jrun("check", fixtures / "corpus.json")
    assert code == 0
    assert all(v["ok"] for v in out["algebras"].values())


def test_check_problems(fixtures):
    code, out, _ = jrun("check", fixtures / "problems.json")
    assert code == 0
    assert set(out["mc"]) == {"a0", "a1", "a2"}


def test_check_corrupted_sign(fixtures):
    code, out, _ = jrun("check", fixtures / "corrupted_sign.json")
    assert code == 1
    assert out["algebras"]["gauge"]["violations"][0].startswith("arity 2 on (g, x)")


def test_check_empty_file(fixtures):
    code, out, _ = jrun("check", fixtures / "empty.json")
    assert code == 0 and out == {"format": ser.FORMAT}


@pytest.mark.parametrize("text", [
    "{not json",
    "[]",
    '{"format": "other/9"}',
    '{"algebras": {"L": {"basis": [["x", 0, 1]], "differential": {"q": {"x": "1"}}}}}',
    '{"algebras": {"L": {"basis": [["x", 0, 1], ["y", 1, 2]], "brackets": [{"args": ["x", "x"], "value": {"y": "1/0"}}]}}}',
    '{"algebras": {"L": {"basis": [["x", 0, 1], ["y", 0, 2]], "brackets": [{"args": ["x", "x"], "value": {"y": "1"}}]}}}',
    '{"mc": {"a": {"algebra": "nope", "value": {}}}}',
    '{"algebras": {"L": {"basis": [["x", 0, 1]]}}, "simplices": {"s": {"algebra": "L", "n": 1, "value": {"x": "t2"}}}}',
])
def test_malformed_inputs(tmp_path, text):
    code, out, _ = jrun("check", write(tmp_path, text))
    assert code == 3 and "error" in out


def test_missing_file_and_bad_flags(tmp_path):
    assert run(["check", str(tmp_path / "absent.json")])[0] == 3
    assert run(["frobnicate"])[0] == 3
    assert run(["transfer", "x", "--pivot-order", "random"])[0] == 3
    assert run(["check"])[0] == 3


def test_entry_point(fixtures):
    p = subprocess.run([sys.executable, "-m", "linfmc.cli", "check", str(fixtures / "corrupted_sign.json")],
                       capture_output=True, text=True)
    assert p.returncode == 1 and "(g, x)" in p.stdout


# twist


def test_twist_by_zero_is_byte_identical(fixtures):
    path = fixtures / "gauge_only.json"
    code, _, text = jrun("twist", path, "--element", "{}")
    assert code == 0 and text == path.read_text()


def test_twist_abelian_unchanged(fixtures):
    code, out, _ = jrun("twist", fixtures / "corpus.json", "--algebra", "abelian", "--element", '{"b": "2", "k": "-1"}')
    assert code == 0
    src = json.loads((fixtures / "corpus.json").read_text())
    assert out["algebras"]["abelian"] == src["algebras"]["abelian"]


def test_twist_non_mc_is_validation_failure(fixtures):
    code, out, _ = jrun("twist", fixtures / "gauge_only.json", "--element", '{"x": "1"}')
    assert code == 1 and out["curvature"] == {"y": "1/2"}


@settings(max_examples=6)
@given(st.sampled_from(["a0", "a1", "a2"]))
def test_twisted_output_passes_check(tmp_path_factory, name):
    fixtures = corpus_dir()
    d = tmp_path_factory.mktemp("tw")
    cert = d / "cert.json"
    code, _, text = jrun("twist", fixtures / "problems.json", "--algebra", "gauge", "--mc", name,
                         "--certificate", cert)
    assert code == 0 and json.loads(cert.read_text())["ok"]
    p = write(d, text)
    code, out, _ = jrun("check", p)
    assert code == 0
    # the twisting element itself moved to 0
    assert out["mc"][name]["ok"] and json.loads(text)["mc"][name]["value"] == {}


def corpus_dir():
    from pathlib import Path
    return Path(__file__).parent / "fixtures"


# fill-horn / lift


def test_fill_horn_certificate_zero(fixtures, tmp_path):
    code, out, text = jrun("fill-horn", fixtures / "problems.json")
    assert code == 0
    cert = out["certificate"]
    assert cert["curvature"] == {} and all(v == {} for v in cert["face_residuals"].values())
    assert jrun("check", write(tmp_path, text))[0] == 0


def test_fill_horn_deterministic(fixtures):
    a = run(["fill-horn", str(fixtures / "problems.json"), "--seed", "5"])
    b = run(["fill-horn", str(fixtures / "problems.json"), "--seed", "5"])
    c = run(["fill-horn", str(fixtures / "problems.json")])
    assert a == b and a[1] != c[1]


def test_fill_degenerate_horn(tmp_path):
    G = corpus.gauge()
    v = {"u": "9/2", "x": "3"}
    e = {k: c for k, c in v.items()}
    doc = {"format": ser.FORMAT, "algebras": {"gauge": ser.algebra_json(G)},
           "horns": {"h": {"algebra": "gauge", "m": 2, "k": 1, "faces": {"0": e, "2": e}}}}
    code, out, _ = jrun("fill-horn", write(tmp_path, doc))
    assert code == 0
    assert out["simplices"]["h_filler"]["value"] == v


def test_lift_certificates(fixtures, tmp_path):
    for name in ("l20", "l0"):
        code, out, text = jrun("lift", fixtures / "problems.json", "--lift", name)
        assert code == 0
        cert = out["certificate"]
        assert cert["curvature"] == {} and cert["image_residual"] == {}
        assert all(v == {} for v in cert["face_residuals"].values())
        assert all(r["eta_closed"] and r["eta_vanishes_on_horn"] for r in cert["tower"])
        assert jrun("check", write(tmp_path, text))[0] == 0


def test_identity_fibration_lift(tmp_path, fixtures):
    src = json.loads((fixtures / "problems.json").read_text())
    G = corpus.gauge()
    doc = {"format": ser.FORMAT, "algebras": {"gauge": src["algebras"]["gauge"]},
           "morphisms": {"id": {"source": "gauge", "target": "gauge",
                                "components": [{"args": [n], "value": {n: "1"}} for n in G.space.names]}},
           "lifts": {"l": {"morphism": "id", "m": 2, "k": 1, "faces": src["horns"]["h21"]["faces"],
                           "target": src["simplices"]["s"]["value"]}}}
    code, out, _ = jrun("lift", write(tmp_path, doc))
    assert code == 0 and out["certificate"]["image_residual"] == {}
    assert out["simplices"]["l_lift"]["value"] == src["simplices"]["s"]["value"]


def test_lift_through_non_fibration_is_infeasible(tmp_path):
    doc = {"format": ser.FORMAT,
           "algebras": {"Z": {"basis": [], "depth": 3},
                        "T": {"basis": [["a", -1, 1], ["b", 0, 1]], "differential": {"a": {"b": "1"}}, "depth": 3}},
           "morphisms": {"z": {"source": "Z", "target": "T", "components": []}},
           "lifts": {"l": {"morphism": "z", "m": 0, "faces": {}, "target": {}}}}
    code, out, _ = jrun("lift", write(tmp_path, doc))
    assert code == 2


# transfer / connect


def test_transfer_and_round_trip(fixtures, tmp_path):
    code, out, text = jrun("transfer", fixtures / "corpus.json", "--transfer", "htt")
    assert code == 0 and out["certificate"]["zero"]
    sol = out["solutions"]["htt_lex"]
    assert {"args": ["ha", "ha"], "value": {"hc": "1"}} in sol["Q_A"]
    p = write(tmp_path, text)
    code, chk, _ = jrun("check", p)
    assert code == 0 and chk["solutions"]["htt_lex"]["ok"]
    assert run(["transfer", str(fixtures / "corpus.json"), "--transfer", "htt"])[1] == text


def test_transfer_broken_phi(fixtures):
    code, out, _ = jrun("transfer", fixtures / "corpus.json", "--transfer", "htt_broken")
    assert code == 2
    ob = out["obstruction"]
    assert ob["arity"] == 2 and ob["value"] != "0"
    assert out["quasi_isomorphism"] is False


def test_transfer_abelian_is_trivial(tmp_path):
    doc = {"format": ser.FORMAT,
           "algebras": {"B": {"basis": [["a", 0, 1], ["e", -1, 2], ["b", 0, 2]], "differential": {"e": {"b": "1"}},
                              "depth": 3}},
           "complexes": {"A": {"basis": [["ha", 0, 1]], "differential": {}}},
           "maps": {"phi": {"source": "A", "target": "B", "entries": {"ha": {"a": "1"}}}},
           "transfers": {"T": {"algebra": "B", "complex": "A", "map": "phi", "arity_cap": 3}}}
    code, out, _ = jrun("transfer", write(tmp_path, doc))
    assert code == 0 and out["solutions"]["T_lex"] == {"transfer": "T", "Q_A": [], "F": []}


def test_connect_pivot_variants(fixtures, tmp_path):
    _, _, a = jrun("transfer", fixtures / "corpus.json", "--transfer", "htt5")
    _, _, b = jrun("transfer", write(tmp_path, a, "a.json"), "--transfer", "htt5", "--pivot-order", "revlex")
    p = write(tmp_path, b, "b.json")
    code, out, _ = jrun("connect", p, "--solutions", "htt5_lex", "htt5_revlex")
    assert code == 0 and out["found"] and not out["degenerate"]
    assert out["certificate"]["residuals"] == 0
    code, out, _ = jrun("connect", p, "--solutions", "htt5_lex", "htt5_lex")
    assert code == 0 and out["degenerate"]


def test_connect_mc_elements(fixtures, tmp_path):
    code, out, text = jrun("connect", fixtures / "problems.json", "--mc", "a0", "a0")
    assert code == 0 and out["found"]
    assert jrun("check", write(tmp_path, text))[0] == 0
    doc = {"format": ser.FORMAT, "algebras": {"A": ser.algebra_json(corpus.abelian())},
           "mc": {"z": {"algebra": "A", "value": {}}, "k": {"algebra": "A", "value": {"k": "1"}},
                  "b": {"algebra": "A", "value": {"b": "2"}}}}
    p = write(tmp_path, doc, "ab.json")
    assert jrun("connect", p, "--mc", "z", "b")[0] == 0
    assert jrun("connect", p, "--mc", "z", "k")[0] == 2


# report / flags


def test_report_rows(tmp_path, fixtures):
    G = corpus.gauge()
    Q2, p, _ = quotient_tower(G, 2)
    doc = {"format": ser.FORMAT,
           "algebras": {"gauge": ser.algebra_json(G), "gauge_F2": ser.algebra_json(Q2)},
           "morphisms": {"id": {"source": "gauge", "target": "gauge",
                                "components": [{"args": [n], "value": {n: "1"}} for n in G.space.names]},
                         "p2": ser.morphism_json(p, "gauge_F2", "gauge_F2")}}
    # p2 : gauge/F2 -> gauge/F1 = 0; declare the target
    doc["algebras"]["zero"] = {"basis": [], "depth": 2}
    doc["morphisms"]["p2"]["target"] = "zero"
    code, out, _ = jrun("report", write(tmp_path, doc))
    assert code == 0
    assert out["morphisms"]["id"]["weak_equivalence"] and out["morphisms"]["id"]["fibration"]
    assert out["morphisms"]["p2"]["fibration"]
    assert out["algebras"]["gauge"]["cohomology"] == {"-1": 0, "0": 0, "1": 0}
    code, out, _ = jrun("report", fixtures / "corpus.json")
    assert out["transfers"]["htt_broken"]["piB_weak_equivalence"] is False
    assert out["transfers"]["htt"]["piB_weak_equivalence"] is True


def test_truncation_depth_flag(fixtures):
    code, out, _ = jrun("report", fixtures / "problems.json", "--truncation-depth", "2")
    assert code == 0
    assert out["algebras"]["gauge"]["dimension"] == 2 and out["algebras"]["gauge"]["depth"] == 2
    assert jrun("check", fixtures / "problems.json", "--truncation-depth", "2")[0] in (0, 1)


def test_arity_cap_flag(fixtures):
    code, out, _ = jrun("transfer", fixtures / "corpus.json", "--transfer", "htt", "--arity-cap", "2")
    assert code == 0
    assert [s["arity"] for s in out["certificate"]["stages"]] == [2]
    assert run(["check", "x", "--arity-cap", "0"])[0] == 3


def test_out_flag(fixtures, tmp_path):
    from linfmc.cli import main
    dest = tmp_path / "o.json"
    assert main(["check", str(fixtures / "corpus.json"), "--out", str(dest)]) == 0
    assert json.loads(dest.read_text())["format"] == ser.FORMAT
