"""The stereo fixture: a small partial model, its pinned automaton and the
artifacts a replay must reproduce."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from ..automata import BuchiAutomaton
from ..documents import automaton_from_doc, model_from_doc
from ..engine import Value, check
from ..ltl import parse_ltl
from ..oracle import UltimatelyPeriodicWord, eval_ltl_on_word
from ..pks import PartialKripkeStructure, complement_close, pessimistic
from ..proof import CONCLUSION, FAIL, INDUCTION, SUCCESSORS, Proof, check_proof

PROPERTY = "G(edb -> F(cert | fl))"


class FixtureRegression(AssertionError):
    pass


def _read(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


def stereo_model() -> PartialKripkeStructure:
    return model_from_doc(json.loads(_read("stereo.pks")), "stereo.pks")


def reference_automaton() -> BuchiAutomaton:
    return automaton_from_doc(json.loads(_read("a_ref.ba")), "a_ref.ba")


def expected() -> dict:
    return json.loads(_read("expected.json"))


def fixture_path(name: str):
    """Filesystem path of a shipped fixture file (for the CLI and docs)."""
    return resources.files(__name__).joinpath(name)


@dataclass(frozen=True)
class Assertion:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class FixtureReport:
    assertions: tuple[Assertion, ...]

    @property
    def ok(self) -> bool:
        return all(a.ok for a in self.assertions)

    def __getitem__(self, name: str) -> Assertion:
        for a in self.assertions:
            if a.name == name:
                return a
        raise KeyError(name)

    def raise_for_failure(self):
        bad = [a for a in self.assertions if not a.ok]
        if bad:
            raise FixtureRegression("; ".join(f"({a.name}) {a.detail}" for a in bad))

    def __str__(self):
        return "\n".join(f"({a.name}) {'ok' if a.ok else 'FAIL'}{': ' + a.detail if a.detail else ''}"
                         for a in self.assertions)


def proof_skeleton(proof: Proof) -> dict:
    """The parts of a proof the replay pins: rule kinds, components, exits."""
    out = {"fail": [], "induction": [], "successors": [], "conclusion": None, "successor_premises": {}}
    for st in proof.steps:
        if st.kind == FAIL:
            out["fail"].extend(str(n) for n in st.component)
        elif st.kind == INDUCTION:
            out["induction"].append({"component": [str(n) for n in st.component],
                                     "exit": [str(n) for n in st.exits]})
        elif st.kind == SUCCESSORS:
            node = str(st.component[0])
            out["successors"].append(node)
            out["successor_premises"][node] = [str(x) for x in st.premises]
        elif st.kind == CONCLUSION:
            out["conclusion"] = str(st.conclusions[0])
    return out


def verify_fixture(model: PartialKripkeStructure | None = None,
                   automaton: BuchiAutomaton | None = None) -> FixtureReport:
    """Replay the fixture and compare every pinned artifact.

    (a) pessimistic lasso, projection and product trace; (b) optimistic product
    empty; (c) proof skeleton, with the proof re-checked; (d) verdict maybe.
    Pass a modified ``model`` to see which assertions a change breaks.
    """
    model = stereo_model() if model is None else model
    automaton = reference_automaton() if automaton is None else automaton
    want = expected()
    phi = parse_ltl(want["property"])
    v = check(model, phi, automaton)
    results = []

    # (a)
    lasso = v.pessimistic_run.lasso
    if lasso is None:
        results.append(Assertion("a", False, "pessimistic product is empty"))
    else:
        cx = want["counterexample"]
        got_states = lasso.states()
        got_trace = ([str(n) for n in lasso.prefix], [str(n) for n in lasso.cycle])
        problems = []
        if got_states != (tuple(cx["states"]["prefix"]), tuple(cx["states"]["cycle"])):
            problems.append(f"projection {got_states}")
        if got_trace != (cx["trace"]["prefix"], cx["trace"]["cycle"]):
            problems.append(f"trace {lasso}")
        pes = pessimistic(complement_close(model))
        word = UltimatelyPeriodicWord(tuple(pes.label(s) for s in got_states[0]),
                                      tuple(pes.label(s) for s in got_states[1]))
        if eval_ltl_on_word(phi, word):
            problems.append("oracle says the lasso word satisfies the property")
        results.append(Assertion("a", not problems, "; ".join(problems)))

    # (b)
    opt = v.optimistic_run.lasso
    results.append(Assertion("b", opt is None, "" if opt is None else f"optimistic lasso {opt}"))

    # (c)
    try:
        proof = v.proof if v.proof_source == "optimistic" else None
        if proof is None:
            raise FixtureRegression("no proof from the optimistic run")
        sk, pw = proof_skeleton(proof), want["proof"]
        problems = []
        for key in ("fail", "induction", "successors"):
            if sk[key] != pw[key]:
                problems.append(f"{key}: {sk[key]}")
        if pw["s2_extra_premise"] not in sk["successor_premises"].get("<s2,q0>", []):
            problems.append("<s2,q0> step lacks the s5 premise")
        if sk["conclusion"] != pw["conclusion"]:
            problems.append(f"conclusion: {sk['conclusion']}")
        report = check_proof(v.optimistic_run.product, proof)
        if not report.accepted:
            problems.append(f"checker rejects: {report.reason}")
        results.append(Assertion("c", not problems, "; ".join(problems)))
    except FixtureRegression as exc:
        results.append(Assertion("c", False, str(exc)))

    # (d)
    results.append(Assertion("d", v.value is Value(want["verdict"]), f"verdict {v.value.value}"))
    return FixtureReport(tuple(results))
