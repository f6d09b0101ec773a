"""JSON documents for models and automata."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .automata import BuchiAutomaton, Transition
from .ltl import LtlSyntaxError, negate, parse_ltl, to_nnf, to_text
from .pks import KripkeStructure, PartialKripkeStructure, ThreeValue


class DocumentError(ValueError):
    """Malformed input document; ``location`` is a JSON path or line/column."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


def dumps(doc) -> str:
    """Canonical, byte-stable JSON text."""
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _loads(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, f"{source}:{exc.lineno}:{exc.colno}") from None


def _expect(cond, message, location):
    if not cond:
        raise DocumentError(message, location)


# ---------------------------------------------------------------------------
# models


def model_to_doc(m) -> dict:
    def show(v):
        if isinstance(v, ThreeValue):
            return v.value
        return "T" if v else "F"

    return {
        "atoms": list(m.atoms),
        "states": [{"id": s, "labels": {p: show(v) for p, v in m.labels[s].items()}} for s in m.states],
        "initial": list(m.initial),
        "transitions": [[a, b] for a, b in m.transitions],
    }


def model_from_doc(doc, source: str = "model") -> PartialKripkeStructure:
    _expect(isinstance(doc, dict), "model document must be an object", source)
    for key in ("atoms", "states", "initial", "transitions"):
        _expect(key in doc, f"missing key {key!r}", source)
    atoms = doc["atoms"]
    _expect(isinstance(atoms, list) and all(isinstance(a, str) for a in atoms), "atoms must be a list of strings", f"{source}.atoms")
    states, labels = [], {}
    _expect(isinstance(doc["states"], list), "states must be a list", f"{source}.states")
    for i, st in enumerate(doc["states"]):
        loc = f"{source}.states[{i}]"
        _expect(isinstance(st, dict) and isinstance(st.get("id"), str), "state needs a string id", loc)
        labs = st.get("labels", {})
        _expect(isinstance(labs, dict), "labels must be an object", f"{loc}.labels")
        lab = {}
        for p, v in labs.items():
            _expect(v in ("T", "F", "U"), f"label value must be T, F or U, got {v!r}", f"{loc}.labels.{p}")
            lab[p] = ThreeValue(v)
        states.append(st["id"])
        labels[st["id"]] = lab
    initial = doc["initial"]
    _expect(isinstance(initial, list) and all(isinstance(s, str) for s in initial), "initial must be a list of state ids", f"{source}.initial")
    trans = []
    _expect(isinstance(doc["transitions"], list), "transitions must be a list", f"{source}.transitions")
    for i, t in enumerate(doc["transitions"]):
        _expect(
            isinstance(t, list) and len(t) == 2 and all(isinstance(x, str) for x in t),
            "transition must be a [from, to] pair of state ids", f"{source}.transitions[{i}]",
        )
        trans.append((t[0], t[1]))
    return PartialKripkeStructure(tuple(atoms), tuple(states), tuple(initial), tuple(trans), labels)


def load_model(path) -> PartialKripkeStructure:
    path = Path(path)
    return model_from_doc(_loads(path.read_text(), str(path)), str(path))


def kripke_from_doc(doc, source: str = "model") -> KripkeStructure:
    m = model_from_doc(doc, source)
    for s in m.states:
        for p, v in m.labels[s].items():
            _expect(v is not ThreeValue.U, "a complete structure cannot contain U", f"{source}.{s}.{p}")
    return KripkeStructure(m.atoms, m.states, m.initial, m.transitions,
                           {s: {p: v is ThreeValue.T for p, v in m.labels[s].items()} for s in m.states})


# ---------------------------------------------------------------------------
# automata


def automaton_to_doc(a: BuchiAutomaton) -> dict:
    return {
        "states": list(a.states),
        "initial": list(a.initial),
        "accepting": sorted(a.accepting),
        "edges": [{"from": t.source, "guard": to_text(t.guard), "to": t.target} for t in a.transitions],
        "eta": {q: to_text(a.eta[q]) for q in a.states if q in a.eta},
        "mu": {q: to_text(a.mu[q]) for q in a.states if q in a.mu},
    }


def _formula(text, location):
    _expect(isinstance(text, str), "formula must be a string", location)
    try:
        return to_nnf(parse_ltl(text))
    except LtlSyntaxError as exc:
        raise DocumentError(str(exc), location) from None


def automaton_from_doc(doc, source: str = "automaton") -> BuchiAutomaton:
    """Read an automaton document; guards and annotations are normalised to NNF.

    ``mu`` is recomputed from ``eta`` when absent.
    """
    _expect(isinstance(doc, dict), "automaton document must be an object", source)
    for key in ("states", "initial", "accepting", "edges"):
        _expect(key in doc, f"missing key {key!r}", source)
    states = tuple(doc["states"])
    known = set(states)
    for key in ("initial", "accepting"):
        for q in doc[key]:
            _expect(q in known, f"unknown state {q!r}", f"{source}.{key}")
    trans = []
    for i, e in enumerate(doc["edges"]):
        loc = f"{source}.edges[{i}]"
        _expect(isinstance(e, dict) and {"from", "guard", "to"} <= set(e), "edge needs from, guard, to", loc)
        _expect(e["from"] in known and e["to"] in known, "edge references an unknown state", loc)
        trans.append(Transition(e["from"], _formula(e["guard"], f"{loc}.guard"), e["to"]))
    eta = {q: _formula(t, f"{source}.eta.{q}") for q, t in doc.get("eta", {}).items()}
    if "mu" in doc:
        mu = {q: _formula(t, f"{source}.mu.{q}") for q, t in doc["mu"].items()}
    else:
        mu = {q: negate(f) for q, f in eta.items()}
    return BuchiAutomaton(states, tuple(doc["initial"]), tuple(trans), frozenset(doc["accepting"]), eta, mu)


def load_automaton(path) -> BuchiAutomaton:
    path = Path(path)
    return automaton_from_doc(_loads(path.read_text(), str(path)), str(path))


# ---------------------------------------------------------------------------
# identity


def _digest(doc) -> str:
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


def model_id(m) -> str:
    return "m-" + _digest(model_to_doc(m))


def automaton_id(a: BuchiAutomaton) -> str:
    return "a-" + _digest(automaton_to_doc(a))


def read_json(path, source=None):
    path = Path(path)
    return _loads(path.read_text(), source or str(path))
