"""Deductive temporal proofs extracted from an empty product, and their checker.

Rules, over judgments ``s |= mu(q)`` keyed by product node <s,q>:

Fail        <s,q> has no product successors.
Induction   X is a non-trivial SCC without accepting nodes and every node in
            Exit(X) is already proved; all of X is proved.
Successors  every product successor of <s,q> is already proved.
Conclusion  every initial node is proved, hence M |= target.
"""
from __future__ import annotations

import heapq
import json
import re
from dataclasses import dataclass
from typing import Union

from .automata import guard_eval
from .documents import automaton_id, dumps, model_id
from .ltl import Formula, to_text
from .product import (
    ProductAutomaton,
    ProductNode,
    exit_nodes,
    fail_nodes,
    find_accepting_lasso,
    scc_decomposition,
)

FAIL, INDUCTION, SUCCESSORS, CONCLUSION = "Fail", "Induction", "Successors", "Conclusion"
KINDS = (FAIL, INDUCTION, SUCCESSORS, CONCLUSION)


class NonEmptyProductError(ValueError):
    pass


class ProofGenerationError(RuntimeError):
    """Some node could not be discharged by any rule."""


class ProofMismatchError(ValueError):
    pass


class ProofFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class Judgment:
    state: str
    aut: str
    formula: str

    @property
    def node(self) -> ProductNode:
        return ProductNode(self.state, self.aut)

    def __str__(self):
        return f"{self.state} |= mu({self.aut}) = {self.formula}"


@dataclass(frozen=True)
class Holds:
    """Premise ``s |= mu(q1) & mu(q2) ...``: earlier judgments for one model state."""

    state: str
    auts: tuple[str, ...]

    def nodes(self):
        return [ProductNode(self.state, q) for q in self.auts]

    def __str__(self):
        return f"{self.state} |= " + " & ".join(f"mu({q})" for q in self.auts)


@dataclass(frozen=True)
class TransitionFact:
    state: str
    successors: tuple[str, ...]

    def __str__(self):
        return f"{self.state} -> {{{', '.join(self.successors)}}}"


@dataclass(frozen=True)
class NoSuccessors:
    node: ProductNode

    def __str__(self):
        return f"{self.node} has no successors"


@dataclass(frozen=True)
class ModelSatisfies:
    formula: str

    def __str__(self):
        return f"M |= {self.formula}"


Premise = Union[Holds, TransitionFact, NoSuccessors]
Conclusion = Union[Judgment, ModelSatisfies]


@dataclass(frozen=True)
class ProofStep:
    kind: str
    component: tuple[ProductNode, ...]
    premises: tuple[Premise, ...]
    conclusions: tuple[Conclusion, ...]
    exits: tuple[ProductNode, ...] = ()


@dataclass(frozen=True)
class Proof:
    steps: tuple[ProofStep, ...]
    target: str
    model_id: str
    automaton_id: str

    def judgments(self) -> list[Judgment]:
        return [c for st in self.steps for c in st.conclusions if isinstance(c, Judgment)]


# ---------------------------------------------------------------------------
# generation


def _judgment(p: ProductAutomaton, node) -> Judgment:
    return Judgment(node[0], node[1], to_text(p.automaton.mu[node[1]]))


def _holds_premises(nodes) -> list[Holds]:
    by_state: dict[str, list[str]] = {}
    for s, q in sorted(nodes):
        by_state.setdefault(s, []).append(q)
    return [Holds(s, tuple(qs)) for s, qs in sorted(by_state.items())]


def _depths(p: ProductAutomaton) -> list[float]:
    depth = [float("inf")] * len(p.nodes)
    frontier = list(p.initial)
    for i in frontier:
        depth[i] = 0
    while frontier:
        nxt = []
        for i in frontier:
            for j in p.successor_ids(i):
                if depth[j] == float("inf"):
                    depth[j] = depth[i] + 1
                    nxt.append(int(j))
        frontier = nxt
    return depth


def generate_proof(p: ProductAutomaton, target: Formula | str | None = None) -> Proof:
    """Proof that no initial product node has an accepting run.

    Fail steps come first in node order. Then Induction and Successors steps
    are emitted as they become dischargeable, Induction preferred, deeper
    nodes (BFS distance from the initial nodes) first, ties in node order.
    """
    if find_accepting_lasso(p) is not None:
        raise NonEmptyProductError("the product has an accepting lasso; there is nothing to prove")
    if target is None:
        target = p.automaton.mu[p.automaton.initial[0]]
    if not isinstance(target, str):
        target = to_text(target)
    m = p.model
    steps: list[ProofStep] = []
    proved: set[ProductNode] = set()

    for node in fail_nodes(p):
        steps.append(ProofStep(FAIL, (node,), (NoSuccessors(node),), (_judgment(p, node),)))
        proved.add(node)

    depth = _depths(p)
    items = []  # (kind, nodes, deps)
    for scc in scc_decomposition(p):
        if scc.trivial:
            node = scc.nodes[0]
            if node in proved:
                continue
            items.append((SUCCESSORS, scc.nodes, set(p.successors(node))))
        else:
            if any(p.is_accepting(n) for n in scc.nodes):
                raise ProofGenerationError(
                    f"SCC {{{', '.join(map(str, scc.nodes))}}} contains an accepting node and cannot be discharged"
                )
            items.append((INDUCTION, scc.nodes, set(exit_nodes(p, scc.nodes))))

    waiting: dict[ProductNode, list[int]] = {}
    missing = []
    heap = []

    def push(k):
        kind, nodes, _ = items[k]
        d = min(depth[p.index(n)] for n in nodes)
        key = (0 if kind == INDUCTION else 1, -d, p.index(nodes[0]))
        heapq.heappush(heap, (key, k))

    for k, (_, _, deps) in enumerate(items):
        todo = deps - proved
        missing.append(len(todo))
        for n in todo:
            waiting.setdefault(n, []).append(k)
        if not todo:
            push(k)

    done = 0
    while heap:
        _, k = heapq.heappop(heap)
        kind, nodes, deps = items[k]
        done += 1
        if kind == INDUCTION:
            states = sorted({n.state for n in nodes})
            premises = tuple(_holds_premises(deps)) + tuple(TransitionFact(s, m.successors(s)) for s in states)
            steps.append(ProofStep(INDUCTION, tuple(nodes), premises,
                                   tuple(_judgment(p, n) for n in nodes), tuple(sorted(deps))))
        else:
            node = nodes[0]
            premises = (TransitionFact(node.state, m.successors(node.state)),) + tuple(_holds_premises(deps))
            steps.append(ProofStep(SUCCESSORS, (node,), premises, (_judgment(p, node),)))
        for n in nodes:
            if n in proved:
                continue
            proved.add(n)
            for k2 in waiting.pop(n, ()):
                missing[k2] -= 1
                if missing[k2] == 0:
                    push(k2)

    if done != len(items):
        stuck = sorted(n for kind, nodes, _ in items for n in nodes if n not in proved)
        raise ProofGenerationError(f"no rule discharges {', '.join(map(str, stuck[:8]))}")

    init = p.initial_nodes
    steps.append(ProofStep(CONCLUSION, init, tuple(_holds_premises(init)), (ModelSatisfies(target),)))
    return Proof(tuple(steps), target, model_id(p.model), automaton_id(p.automaton))


# ---------------------------------------------------------------------------
# checking


@dataclass(frozen=True)
class CheckReport:
    accepted: bool
    step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.accepted

    def __str__(self):
        if self.accepted:
            return "accepted"
        return f"rejected at step {self.step}: {self.reason}"


class _Reject(Exception):
    pass


class _Facts:
    """Product facts recomputed from the model and automaton, not from the edge table."""

    def __init__(self, p: ProductAutomaton):
        self.p = p
        self.nodes = set(p.nodes)
        self._succ = {}

    def succ(self, node) -> set:
        node = ProductNode(*node)
        if node not in self._succ:
            m, a = self.p.model, self.p.automaton
            label = m.label(node.state)
            qs = {t.target for t in a.outgoing(node.aut) if guard_eval(t.guard, label)}
            self._succ[node] = {ProductNode(s, q) for s in m.successors(node.state) for q in qs}
        return self._succ[node]

    def reach(self, start, inside, reverse=False) -> set:
        seen = {start}
        todo = [start]
        while todo:
            n = todo.pop()
            nbrs = self.succ(n) if not reverse else {u for u in inside if n in self.succ(u)}
            for t in nbrs:
                if t in inside and t not in seen:
                    seen.add(t)
                    todo.append(t)
        return seen

    def scc_of(self, node) -> set:
        fwd = self.reach(node, self.nodes)
        bwd = self.reach(node, fwd, reverse=True)
        return fwd & bwd


def check_proof(p: ProductAutomaton, proof: Proof) -> CheckReport:
    """Independently re-derive every step; report the first violation."""
    if proof.model_id != model_id(p.model) or proof.automaton_id != automaton_id(p.automaton):
        raise ProofMismatchError("proof refers to a different model or automaton")
    facts = _Facts(p)
    proved: set[ProductNode] = set()
    if not proof.steps:
        return CheckReport(False, None, "proof has no steps")
    for i, step in enumerate(proof.steps):
        try:
            _check_step(p, facts, proved, step, is_last=(i == len(proof.steps) - 1))
        except _Reject as exc:
            return CheckReport(False, i, str(exc))
    if proof.steps[-1].kind != CONCLUSION:
        return CheckReport(False, len(proof.steps) - 1, "last step is not a Conclusion")
    return CheckReport(True)


def _check_step(p, facts: _Facts, proved: set, step: ProofStep, is_last: bool):
    m, a = p.model, p.automaton
    if step.kind not in KINDS:
        raise _Reject(f"unknown rule {step.kind!r}")
    for n in step.component + step.exits:
        if n not in facts.nodes:
            raise _Reject(f"{n} is not a node of the product")

    # premises must be true facts or earlier conclusions
    for prem in step.premises:
        if isinstance(prem, Holds):
            for n in prem.nodes():
                if n not in proved:
                    raise _Reject(f"premise {prem} uses unproved judgment for {n}")
        elif isinstance(prem, TransitionFact):
            if prem.state not in m.states or tuple(sorted(prem.successors)) != m.successors(prem.state):
                raise _Reject(f"transition premise {prem} does not hold in the model")
        elif isinstance(prem, NoSuccessors):
            if facts.succ(prem.node):
                raise _Reject(f"premise {prem} is false: node has successors")
        else:
            raise _Reject(f"unknown premise {prem!r}")
    covered = {n for prem in step.premises if isinstance(prem, Holds) for n in prem.nodes()}

    if step.kind == CONCLUSION:
        if not is_last:
            raise _Reject("Conclusion must be the last step")
        for n in p.initial_nodes:
            if n not in covered:
                raise _Reject(f"initial node undischarged: {n}")
        if len(step.conclusions) != 1 or not isinstance(step.conclusions[0], ModelSatisfies):
            raise _Reject("Conclusion must conclude M |= <property>")
        return

    expected = []
    for n in step.component:
        q = n.aut
        if q not in a.mu:
            raise _Reject(f"automaton state {q} has no mu annotation")
        expected.append(Judgment(n.state, q, to_text(a.mu[q])))
    if tuple(step.conclusions) != tuple(expected):
        raise _Reject("conclusions do not match the component's mu judgments")

    if step.kind == FAIL:
        if len(step.component) != 1:
            raise _Reject("Fail covers exactly one node")
        node = step.component[0]
        if facts.succ(node):
            raise _Reject(f"node has successors: {node}")
    elif step.kind == SUCCESSORS:
        if len(step.component) != 1:
            raise _Reject("Successors covers exactly one node")
        node = step.component[0]
        for t in sorted(facts.succ(node)):
            if t not in covered:
                raise _Reject(f"successor {t} of {node} is not among the proved premises")
    elif step.kind == INDUCTION:
        comp = set(step.component)
        first = step.component[0]
        if facts.scc_of(first) != comp:
            raise _Reject("component is not a maximal strongly connected component")
        if len(comp) == 1 and first not in facts.succ(first):
            raise _Reject("component is a trivial SCC")
        acc = [n for n in comp if n.aut in a.accepting]
        if acc:
            raise _Reject(f"component contains accepting node {acc[0]}")
        exits = {t for n in comp for t in facts.succ(n) if t not in comp}
        if exits != set(step.exits):
            raise _Reject("exit set does not match the component's outgoing edges")
        for t in sorted(exits):
            if t not in covered:
                raise _Reject(f"exit node {t} is not among the proved premises")
    proved.update(step.component)


# ---------------------------------------------------------------------------
# rendering and parsing

_NODE_RE = re.compile(r"<\s*([A-Za-z0-9_]+)\s*,\s*([A-Za-z0-9_]+)\s*>\Z")
_HOLDS_RE = re.compile(r"([A-Za-z0-9_]+) \|= (mu\([A-Za-z0-9_]+\)(?: & mu\([A-Za-z0-9_]+\))*)\Z")
_JUDG_RE = re.compile(r"([A-Za-z0-9_]+) \|= mu\(([A-Za-z0-9_]+)\) = (.*)\Z", re.S)
_TRANS_RE = re.compile(r"([A-Za-z0-9_]+) -> \{(.*)\}\Z")
_NOSUCC_RE = re.compile(r"(<[^>]*>) has no successors\Z")


def _parse_node(text: str) -> ProductNode:
    m = _NODE_RE.match(text.strip())
    if not m:
        raise ProofFormatError(f"bad product node {text!r}")
    return ProductNode(m.group(1), m.group(2))


def parse_premise(text: str) -> Premise:
    if m := _HOLDS_RE.match(text):
        auts = tuple(re.findall(r"mu\(([A-Za-z0-9_]+)\)", m.group(2)))
        return Holds(m.group(1), auts)
    if m := _TRANS_RE.match(text):
        succ = tuple(s.strip() for s in m.group(2).split(",") if s.strip())
        return TransitionFact(m.group(1), succ)
    if m := _NOSUCC_RE.match(text):
        return NoSuccessors(_parse_node(m.group(1)))
    raise ProofFormatError(f"unrecognised premise {text!r}")


def parse_conclusion(text: str) -> Conclusion:
    if text.startswith("M |= "):
        return ModelSatisfies(text[len("M |= "):])
    if m := _JUDG_RE.match(text):
        return Judgment(m.group(1), m.group(2), m.group(3))
    raise ProofFormatError(f"unrecognised conclusion {text!r}")


def proof_to_doc(proof: Proof) -> dict:
    steps = []
    for st in proof.steps:
        d = {
            "kind": st.kind,
            "component": [str(n) for n in st.component],
            "premises": [str(x) for x in st.premises],
            "conclusions": [str(x) for x in st.conclusions],
        }
        if st.kind == INDUCTION:
            d["exit"] = [str(n) for n in st.exits]
        steps.append(d)
    return {"target": proof.target, "model": proof.model_id, "automaton": proof.automaton_id, "steps": steps}


def proof_from_doc(doc) -> Proof:
    try:
        steps = []
        for d in doc["steps"]:
            if d["kind"] not in KINDS:
                raise ProofFormatError(f"unknown step kind {d['kind']!r}")
            steps.append(ProofStep(
                d["kind"],
                tuple(_parse_node(x) for x in d["component"]),
                tuple(parse_premise(x) for x in d["premises"]),
                tuple(parse_conclusion(x) for x in d["conclusions"]),
                tuple(_parse_node(x) for x in d.get("exit", ())),
            ))
        return Proof(tuple(steps), doc["target"], doc["model"], doc["automaton"])
    except (KeyError, TypeError) as exc:
        raise ProofFormatError(f"malformed proof document: {exc}") from None


def parse_proof_json(text: str) -> Proof:
    return proof_from_doc(json.loads(text))


def _md(text: str) -> str:
    return (text.replace("|=", "⊨").replace("mu(", "μ(")
            .replace("|", "\\|").replace("<", "⟨").replace(">", "⟩").replace("-⟩", "→"))


def _md_judgment(c) -> str:
    if isinstance(c, Judgment):
        return _md(f"{c.state} |= mu({c.aut})") + " = `" + c.formula.replace("|", "\\|") + "`"
    return _md(str(c))


def _rule_cell(premises, conclusions) -> str:
    prem = "<br>".join(_md(str(x)) for x in premises)
    concl = "<br>".join(_md_judgment(c) for c in conclusions)
    return f"{prem}<br>⟹ {concl}" if prem else f"⟹ {concl}"


def render_markdown(proof: Proof) -> str:
    lines = ["| Step | Component | Rule |", "|---|---|---|"]
    steps = list(proof.steps)
    i = 0
    while i < len(steps):
        st = steps[i]
        if st.kind == FAIL:
            group = [st]
            while i + 1 < len(steps) and steps[i + 1].kind == FAIL:
                i += 1
                group.append(steps[i])
            comp = ", ".join(_md(str(n)) for g in group for n in g.component)
            rule = _rule_cell([x for g in group for x in g.premises], [c for g in group for c in g.conclusions])
            lines.append(f"| Fail | {comp} | {rule} |")
        elif st.kind == CONCLUSION:
            prem = " ∧ ".join(_md(str(x)) for x in st.premises)
            concl = " ".join(_md(str(c)).replace("M ⊨ ", "M ⊨ `", 1) + "`" for c in st.conclusions)
            lines.append(f"| Conclusion |  | {prem} ⟹ {concl} |")
        else:
            comp = ", ".join(_md(str(n)) for n in st.component)
            if st.kind == INDUCTION:
                comp = "X = {" + comp + "}, Exit(X) = {" + ", ".join(_md(str(n)) for n in st.exits) + "}"
            lines.append(f"| {st.kind} | {comp} | {_rule_cell(st.premises, st.conclusions)} |")
        i += 1
    return "\n".join(lines) + "\n"


def render_proof(proof: Proof, fmt: str = "markdown") -> str:
    """Render as a Step | Component | Rule table (``markdown``) or as JSON."""
    if fmt == "markdown":
        return render_markdown(proof)
    if fmt == "json":
        return dumps(proof_to_doc(proof))
    raise ValueError(f"unknown proof format {fmt!r}")
