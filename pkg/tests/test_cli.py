import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from pkscheck.cli import main
from pkscheck.fixtures import fixture_path

PSI3 = "G(edb -> F(cert | fl))"
STEREO = str(fixture_path("stereo.pks"))
A_REF = str(fixture_path("a_ref.ba"))


def schema(name):
    return json.loads(resources.files("pkscheck").joinpath(f"schemas/{name}.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def u_free(tmp_path):
    doc = {"atoms": ["p"], "states": [{"id": "s0", "labels": {"p": "T"}}, {"id": "s1", "labels": {"p": "F"}}],
           "initial": ["s0"], "transitions": [["s0", "s1"], ["s1", "s1"]]}
    f = tmp_path / "u_free.pks"
    f.write_text(json.dumps(doc))
    return str(f)


class TestCheck:
    def test_stereo_markdown(self, capsys):
        code, out, _ = run(capsys, "check", "--model", STEREO, "--property", PSI3, "--format", "markdown",
                           "--automaton", A_REF)
        assert code == 0
        assert "Verdict: **maybe**" in out
        assert "s0, s2, s5, (s7)^ω" in out
        assert "| Step | Component | Rule |" in out
        assert "| Fail | ⟨s1,q1⟩, ⟨s2,q1⟩" in out

    def test_json_document(self, capsys):
        code, out, _ = run(capsys, "check", "-m", STEREO, "-p", PSI3, "--automaton", A_REF, "--emit-product")
        doc = json.loads(out)
        jsonschema.validate(doc, schema("result"))
        assert doc["verdict"] == "maybe"
        assert doc["counterexample"]["text"] == "s0, s2, s5, (s7)^ω"
        assert doc["counterexample"]["trace"] == {
            "prefix": ["<s0,q0>", "<s2,q0>", "<s5,q0>", "<s7,q0>", "<s7,q1>"], "cycle": ["<s7,q2>"]}
        jsonschema.validate({k: v for k, v in doc["proof"].items()}, schema("proof"))
        jsonschema.validate(doc["automaton_document"], schema("automaton"))

    def test_byte_identical(self, capsys):
        _, a, _ = run(capsys, "check", "-m", STEREO, "-p", PSI3)
        _, b, _ = run(capsys, "check", "-m", STEREO, "-p", PSI3)
        assert a == b

    def test_u_free_true(self, capsys, u_free):
        code, out, _ = run(capsys, "check", "-m", u_free, "-p", "true")
        doc = json.loads(out)
        assert code == 0 and doc["verdict"] == "true"
        assert doc["counterexample"] is None and doc["proof"]["source"] == "pessimistic"

    def test_emit_flags(self, capsys):
        _, out, _ = run(capsys, "check", "-m", STEREO, "-p", PSI3, "--no-emit-proof", "--no-emit-counterexample")
        doc = json.loads(out)
        assert "proof" not in doc and "counterexample" not in doc

    def test_plain_and_output_file(self, capsys, tmp_path):
        target = tmp_path / "out.txt"
        code, out, _ = run(capsys, "check", "-m", STEREO, "-p", PSI3, "-f", "plain", "-o", str(target))
        assert code == 0 and out == ""
        assert "verdict: maybe" in target.read_text()

    def test_property_file(self, capsys, tmp_path):
        f = tmp_path / "psi.ltl"
        f.write_text(PSI3 + "\n")
        code, out, _ = run(capsys, "check", "-m", STEREO, "--property-file", str(f))
        assert code == 0 and json.loads(out)["property"] == PSI3

    def test_one_property_source(self, capsys, tmp_path):
        with pytest.raises(SystemExit) as e:
            main(["check", "-m", STEREO, "-p", PSI3, "--property-file", "x"])
        assert e.value.code == 2

    def test_dangling_transition_strict(self, capsys, tmp_path):
        doc = {"atoms": ["p"], "states": [{"id": "s0", "labels": {"p": "T"}}], "initial": ["s0"],
               "transitions": [["s0", "ghost"]]}
        f = tmp_path / "bad.pks"
        f.write_text(json.dumps(doc))
        code, _, err = run(capsys, "check", "-m", str(f), "-p", "p", "--strict-validate")
        assert code == 2
        assert "non-total state s0" in err

    def test_strict_unreachable(self, capsys, tmp_path, u_free):
        doc = json.loads(open(u_free).read())
        doc["states"].append({"id": "s9", "labels": {"p": "F"}})
        doc["transitions"].append(["s9", "s9"])
        f = tmp_path / "extra.pks"
        f.write_text(json.dumps(doc))
        assert run(capsys, "check", "-m", str(f), "-p", "p")[0] == 0
        code, _, err = run(capsys, "check", "-m", str(f), "-p", "p", "--strict-validate")
        assert code == 2 and "unreachable" in err

    def test_malformed_model(self, capsys, tmp_path):
        f = tmp_path / "m.pks"
        f.write_text('{"atoms": ["p"],')
        code, _, err = run(capsys, "check", "-m", str(f), "-p", "p")
        assert code == 2 and "m.pks:1:" in err

    def test_ltl_syntax_error(self, capsys):
        code, _, err = run(capsys, "check", "-m", STEREO, "-p", "G(edb ->")
        assert code == 2 and "line 1" in err

    def test_unknown_atom(self, capsys):
        code, _, err = run(capsys, "check", "-m", STEREO, "-p", "F zzz")
        assert code == 2 and "zzz" in err


class TestOracle:
    def test_stereo_rows(self, capsys):
        code, out, _ = run(capsys, "oracle", "-m", STEREO, "-p", PSI3)
        doc = json.loads(out)
        jsonschema.validate(doc, schema("oracle"))
        assert code == 0
        assert len(doc["completions"]) == 16
        results = {r["result"] for r in doc["completions"]}
        assert results == {"satisfy", "violate"}
        assert doc["verdict"] == "maybe" and doc["consistent"]

    def test_u_free(self, capsys, u_free):
        _, out, _ = run(capsys, "oracle", "-m", u_free, "-p", "p")
        assert len(json.loads(out)["completions"]) == 1

    def test_cap(self, capsys, tmp_path):
        states = [{"id": f"s{i}", "labels": {"p": "U"}} for i in range(25)]
        doc = {"atoms": ["p"], "states": states, "initial": ["s0"],
               "transitions": [[f"s{i}", f"s{i}"] for i in range(25)]}
        f = tmp_path / "many.pks"
        f.write_text(json.dumps(doc))
        code, _, err = run(capsys, "oracle", "-m", str(f), "-p", "p")
        assert code == 2 and "25 unknown" in err


class TestMisc:
    def test_fixture_schema(self):
        jsonschema.validate(json.loads(fixture_path("stereo.pks").read_text()), schema("pks"))
        jsonschema.validate(json.loads(fixture_path("a_ref.ba").read_text()), schema("automaton"))

    def test_translate(self, capsys):
        code, out, _ = run(capsys, "translate", "-p", "G p")
        jsonschema.validate(json.loads(out), schema("automaton"))
        assert json.loads(out)["states"] == ["q0"]

    def test_verify_fixture(self, capsys):
        code, out, _ = run(capsys, "verify-fixture")
        assert code == 0 and out.count("ok") == 4

    def test_entry_point(self):
        r = subprocess.run([sys.executable, "-m", "pkscheck.cli", "check", "-m", STEREO, "-p", PSI3, "-f", "plain"],
                           capture_output=True, text=True)
        assert r.returncode == 0
        assert "verdict: maybe" in r.stdout
