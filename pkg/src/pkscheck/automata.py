"""Büchi automata with guarded transitions and LTL-to-Büchi translation.

Transitions read the label of the *current* position: a run q0 q1 q2 ... on
the word w0 w1 w2 ... takes ``q_i --g--> q_{i+1}`` only if ``w_i`` satisfies
``g``. Under this reading, state ``q`` carries ``eta[q]``, the formula
satisfied by exactly the words accepted starting in ``q``, and
``mu[q] = nnf(!eta[q])``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .ltl import (
    FALSE,
    TRUE,
    And,
    Atom,
    FalseConst,
    Finally,
    Formula,
    Globally,
    NegAtom,
    Next,
    Not,
    Or,
    Release,
    TrueConst,
    Until,
    atoms,
    conj,
    is_nnf,
    negate,
    subformulas,
    to_text,
)


class UnassignedAtomError(KeyError):
    pass


def guard_eval(guard: Formula, label: Mapping[str, bool]) -> bool:
    """Propositional value of a guard on one complete label."""
    if isinstance(guard, TrueConst):
        return True
    if isinstance(guard, FalseConst):
        return False
    if isinstance(guard, Atom):
        try:
            return bool(label[guard.name])
        except KeyError:
            raise UnassignedAtomError(f"guard atom {guard.name} is not assigned in the label") from None
    if isinstance(guard, NegAtom):
        return not guard_eval(Atom(guard.name), label)
    if isinstance(guard, Not):
        return not guard_eval(guard.operand, label)
    if isinstance(guard, And):
        return guard_eval(guard.left, label) and guard_eval(guard.right, label)
    if isinstance(guard, Or):
        return guard_eval(guard.left, label) or guard_eval(guard.right, label)
    raise TypeError(f"not a propositional guard: {to_text(guard)}")


@dataclass(frozen=True)
class Transition:
    source: str
    guard: Formula
    target: str


@dataclass(frozen=True)
class BuchiAutomaton:
    states: tuple[str, ...]
    initial: tuple[str, ...]
    transitions: tuple[Transition, ...]
    accepting: frozenset[str]
    eta: Mapping[str, Formula]
    mu: Mapping[str, Formula]
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        out: dict[str, list[Transition]] = {q: [] for q in self.states}
        for t in self.transitions:
            out.setdefault(t.source, []).append(t)
        object.__setattr__(self, "_out", {q: tuple(ts) for q, ts in out.items()})

    def outgoing(self, q: str) -> tuple[Transition, ...]:
        return self._out.get(q, ())

    def guard_atoms(self) -> frozenset[str]:
        out: set[str] = set()
        for t in self.transitions:
            out |= atoms(t.guard)
        return frozenset(out)

    def with_annotations(self, eta: Mapping[str, Formula]) -> "BuchiAutomaton":
        return BuchiAutomaton(
            self.states, self.initial, self.transitions, self.accepting,
            dict(eta), {q: negate(f) for q, f in eta.items()},
        )


# ---------------------------------------------------------------------------
# tableau


@dataclass
class _Node:
    ident: int
    incoming: set
    new: list
    old: set
    nxt: set


def _is_literal(f: Formula) -> bool:
    return isinstance(f, (Atom, NegAtom, TrueConst, FalseConst))


def _contradicts(lit: Formula, old: set) -> bool:
    if isinstance(lit, FalseConst):
        return True
    if isinstance(lit, Atom):
        return NegAtom(lit.name) in old
    if isinstance(lit, NegAtom):
        return Atom(lit.name) in old
    return False


class _Tableau:
    INIT = -1

    def __init__(self, order: Mapping[Formula, int]):
        self.order = order
        self.nodes: list[_Node] = []
        self.counter = 0

    def fresh(self) -> int:
        self.counter += 1
        return self.counter - 1

    def pick(self, new: list) -> Formula:
        # deterministic: largest formula (in subterm order) first
        new.sort(key=lambda f: self.order[f])
        return new.pop()

    def expand(self, root: _Node) -> None:
        stack = [root]
        while stack:
            node = stack.pop()
            if not node.new:
                for other in self.nodes:
                    if other.old == node.old and other.nxt == node.nxt:
                        other.incoming |= node.incoming
                        break
                else:
                    self.nodes.append(node)
                    stack.append(_Node(self.fresh(), {node.ident}, list(node.nxt), set(), set()))
                continue
            f = self.pick(node.new)
            if f in node.old:
                stack.append(node)
                continue
            if _is_literal(f):
                if _contradicts(f, node.old):
                    continue
                node.old.add(f)
                stack.append(node)
                continue
            node.old.add(f)
            if isinstance(f, And):
                node.new.extend(g for g in (f.left, f.right) if g not in node.old)
                stack.append(node)
            elif isinstance(f, Next):
                node.nxt.add(f.operand)
                stack.append(node)
            elif isinstance(f, Globally):
                if f.operand not in node.old:
                    node.new.append(f.operand)
                node.nxt.add(f)
                stack.append(node)
            else:
                first_new, first_next, second_new = _split(f)
                n2 = _Node(self.fresh(), set(node.incoming), list(node.new), set(node.old), set(node.nxt))
                n2.new.extend(g for g in second_new if g not in n2.old)
                node.new.extend(g for g in first_new if g not in node.old)
                node.nxt |= set(first_next)
                # push the second branch first so the first branch is expanded first
                stack.append(n2)
                stack.append(node)


def _split(f: Formula):
    """(new1, next1, new2) for the two tableau branches of a disjunctive formula."""
    if isinstance(f, Or):
        return (f.left,), (), (f.right,)
    if isinstance(f, Until):
        return (f.left,), (f,), (f.right,)
    if isinstance(f, Release):
        return (f.right,), (f,), (f.left, f.right)
    if isinstance(f, Finally):
        return (), (f,), (f.operand,)
    raise TypeError(f"unexpected formula in tableau: {to_text(f)}")


def _eventualities(phi: Formula) -> list[Formula]:
    return [g for g in subformulas(phi) if isinstance(g, (Until, Finally))]


def _goal(f: Formula) -> Formula:
    return f.right if isinstance(f, Until) else f.operand


def _node_eta(node: _Node, order) -> Formula:
    lits = sorted((f for f in node.old if _is_literal(f) and f != TRUE), key=lambda f: order[f])
    nxt = sorted(node.nxt, key=lambda f: order[f])
    parts = list(lits)
    if nxt:
        parts.append(Next(conj(nxt)))
    return conj(parts)


def _node_guard(node: _Node, order) -> Formula:
    lits = sorted((f for f in node.old if _is_literal(f) and f != TRUE), key=lambda f: order[f])
    return conj(lits)


def ltl_to_buchi(phi: Formula) -> BuchiAutomaton:
    """Translate an NNF formula into a Büchi automaton accepting exactly its models.

    On-the-fly tableau expansion into a generalized Büchi automaton whose nodes
    carry Now/Next obligations, followed by counter degeneralization. A fresh
    initial state annotated with ``phi`` itself is added when the tableau has
    several initial nodes.
    """
    if not is_nnf(phi):
        raise ValueError(f"ltl_to_buchi expects a formula in NNF, got {to_text(phi)}")

    subs = subformulas(phi)
    order: dict[Formula, int] = {}
    for g in subs:
        order.setdefault(g, len(order))
    # literals introduced while expanding (none beyond subformulas) keep this order

    tab = _Tableau(order)
    tab.expand(_Node(tab.fresh(), {_Tableau.INIT}, [phi], set(), set()))
    nodes = {n.ident: n for n in tab.nodes}
    succ: dict[int, list[int]] = {i: [] for i in nodes}
    for n in tab.nodes:
        for src in n.incoming:
            if src != _Tableau.INIT:
                succ[src].append(n.ident)
    init_nodes = [n.ident for n in tab.nodes if _Tableau.INIT in n.incoming]

    evs = _eventualities(phi)
    fair = [
        {i for i, n in nodes.items() if e not in n.old or _goal(e) in n.old}
        for e in evs
    ]
    k = len(fair)

    # degeneralized states: (node, counter)
    def accepting(state) -> bool:
        i, c = state
        return True if k == 0 else (c == 0 and i in fair[0])

    def step_counter(state) -> int:
        i, c = state
        if k <= 1:
            return 0
        return (c + 1) % k if i in fair[c] else c

    guards = {i: _node_guard(n, order) for i, n in nodes.items()}
    etas = {i: _node_eta(n, order) for i, n in nodes.items()}

    start = [(i, 0) for i in sorted(init_nodes)]
    use_init = len(start) != 1
    INIT = ("init",)

    def out_edges(state):
        if state == INIT:
            edges = []
            for s0 in start:
                edges.extend(out_edges(s0))
            return edges
        i, _ = state
        c2 = step_counter(state)
        return [(guards[i], (j, c2)) for j in sorted(succ[i])]

    roots = [INIT] if use_init else start
    seen = {r: None for r in roots}
    queue = list(roots)
    edges_of = {}
    while queue:
        st = queue.pop(0)
        edges_of[st] = out_edges(st)
        for _, tgt in edges_of[st]:
            if tgt not in seen:
                seen[tgt] = None
                queue.append(tgt)

    names = {st: f"q{n}" for n, st in enumerate(seen)}
    transitions = []
    for st in seen:
        dedup = []
        for g, tgt in edges_of[st]:
            t = Transition(names[st], g, names[tgt])
            if t not in dedup:
                dedup.append(t)
        transitions.extend(dedup)
    eta = {}
    for st in seen:
        eta[names[st]] = phi if st == INIT else etas[st[0]]
    acc = frozenset(names[st] for st in seen if st != INIT and accepting(st))
    return BuchiAutomaton(
        states=tuple(names[st] for st in seen),
        initial=tuple(names[r] for r in roots),
        transitions=tuple(transitions),
        accepting=acc,
        eta=eta,
        mu={q: negate(f) for q, f in eta.items()},
    )


def reference_automaton() -> BuchiAutomaton:
    """The pinned three-state automaton for F(edb & X G(!cert & !fl))."""
    safe = And(NegAtom("cert"), NegAtom("fl"))
    eta = {
        "q0": Finally(And(Atom("edb"), Next(Globally(safe)))),
        "q1": Globally(safe),
        "q2": Globally(safe),
    }
    return BuchiAutomaton(
        states=("q0", "q1", "q2"),
        initial=("q0",),
        transitions=(
            Transition("q0", TRUE, "q0"),
            Transition("q0", Atom("edb"), "q1"),
            Transition("q1", safe, "q2"),
            Transition("q2", safe, "q2"),
        ),
        accepting=frozenset({"q2"}),
        eta=eta,
        mu={q: negate(f) for q, f in eta.items()},
    )


__all__ = [
    "BuchiAutomaton",
    "Transition",
    "UnassignedAtomError",
    "guard_eval",
    "ltl_to_buchi",
    "reference_automaton",
    "FALSE",
]
