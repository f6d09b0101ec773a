"""Synchronous product of a Kripke structure with a Büchi automaton."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from . import _kernels
from .automata import BuchiAutomaton, guard_eval
from .pks import KripkeStructure


class ProductNode(NamedTuple):
    state: str
    aut: str

    def __str__(self):
        return f"<{self.state},{self.aut}>"


class UnknownGuardAtomError(ValueError):
    pass


@dataclass(frozen=True)
class ProductAutomaton:
    """Reachable product, nodes sorted by (state, automaton state).

    An edge <s,q> -> <s',q'> exists iff s -> s' in the model and the automaton
    has q --g--> q' with g true on the label of the source state s.
    """

    model: KripkeStructure
    automaton: BuchiAutomaton
    nodes: tuple[ProductNode, ...]
    indptr: np.ndarray
    indices: np.ndarray
    initial: tuple[int, ...]
    materialized: frozenset[ProductNode] = frozenset()
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.nodes)})

    def __len__(self):
        return len(self.nodes)

    def index(self, node) -> int:
        return self._index[ProductNode(*node)]

    def __contains__(self, node) -> bool:
        return ProductNode(*node) in self._index

    def successor_ids(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def successors(self, node) -> tuple[ProductNode, ...]:
        i = self.index(node)
        return tuple(self.nodes[j] for j in self.successor_ids(i))

    @property
    def initial_nodes(self) -> tuple[ProductNode, ...]:
        return tuple(self.nodes[i] for i in self.initial)

    @property
    def accepting(self) -> np.ndarray:
        acc = self.automaton.accepting
        return np.fromiter((n.aut in acc for n in self.nodes), dtype=np.bool_, count=len(self.nodes))

    def is_accepting(self, node) -> bool:
        return node[1] in self.automaton.accepting

    def edges(self) -> list[tuple[ProductNode, ProductNode]]:
        return [(self.nodes[i], self.nodes[j]) for i in range(len(self.nodes)) for j in self.successor_ids(i)]


def node_successors(m: KripkeStructure, a: BuchiAutomaton, node) -> list[ProductNode]:
    s, q = node
    label = m.label(s)
    enabled = [t.target for t in a.outgoing(q) if guard_eval(t.guard, label)]
    out = {ProductNode(s2, q2) for s2 in m.successors(s) for q2 in enabled}
    return sorted(out)


def _build(m, a, initial_nodes, extra=()) -> ProductAutomaton:
    succ: dict[ProductNode, list[ProductNode]] = {}
    todo = list(initial_nodes) + list(extra)
    for n in todo:
        succ.setdefault(n, None)
    while todo:
        n = todo.pop()
        if succ.get(n) is not None:
            continue
        succ[n] = node_successors(m, a, n)
        for t in succ[n]:
            if t not in succ:
                succ[t] = None
                todo.append(t)
    nodes = tuple(sorted(succ))
    index = {v: i for i, v in enumerate(nodes)}
    indptr = np.zeros(len(nodes) + 1, dtype=np.int64)
    flat: list[int] = []
    for i, v in enumerate(nodes):
        flat.extend(index[t] for t in succ[v])
        indptr[i + 1] = len(flat)
    indices = np.asarray(flat, dtype=np.int64)
    initial = tuple(sorted(index[n] for n in set(initial_nodes)))
    return nodes, indptr, indices, initial


def intersect(m: KripkeStructure, a: BuchiAutomaton) -> ProductAutomaton:
    missing = a.guard_atoms() - set(m.atoms)
    if missing:
        raise UnknownGuardAtomError(f"automaton guards use atoms unknown to the model: {', '.join(sorted(missing))}")
    init = [ProductNode(s, q) for s in m.initial for q in a.initial]
    nodes, indptr, indices, initial = _build(m, a, init)
    return ProductAutomaton(m, a, nodes, indptr, indices, initial)


def materialize(p: ProductAutomaton, extra: Iterable) -> ProductAutomaton:
    """Add nodes (and everything they reach) that are not reachable from the initial nodes.

    Added nodes are flagged in ``materialized``; emptiness checking never starts
    from them.
    """
    extra = [ProductNode(*n) for n in extra]
    for n in extra:
        if n.state not in p.model.states or n.aut not in p.automaton.states:
            raise ValueError(f"{n} is not a pair of model and automaton states")
    init = [p.nodes[i] for i in p.initial]
    nodes, indptr, indices, initial = _build(p.model, p.automaton, init, extra)
    reachable = set(p.nodes) - set(p.materialized)
    flagged = frozenset(n for n in nodes if n not in reachable)
    return ProductAutomaton(p.model, p.automaton, nodes, indptr, indices, initial, flagged)


# ---------------------------------------------------------------------------
# lassos


@dataclass(frozen=True)
class Lasso:
    prefix: tuple[ProductNode, ...]
    cycle: tuple[ProductNode, ...]

    def states(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        """Model-state projection as (prefix, cycle), folded to its shortest form."""
        return fold_lasso([n.state for n in self.prefix], [n.state for n in self.cycle])

    def word_positions(self):
        return list(self.prefix), list(self.cycle)

    def __str__(self):
        return format_lasso([str(n) for n in self.prefix], [str(n) for n in self.cycle], sep="")


def fold_lasso(prefix, cycle, keep_prefix: int = 1):
    """Shortest equivalent (prefix, cycle): roll repeated tails into the cycle and
    shrink the cycle to its primitive period. At least ``keep_prefix`` prefix
    elements are kept."""
    prefix, cycle = list(prefix), list(cycle)
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            cycle = cycle[:d]
            break
    while len(prefix) > keep_prefix and prefix[-1] == cycle[-1]:
        cycle = [prefix.pop()] + cycle[:-1]
    return tuple(prefix), tuple(cycle)


def format_lasso(prefix, cycle, sep=", ") -> str:
    head = sep.join(prefix)
    loop = sep.join(cycle)
    loop = f"({loop})^ω"
    return f"{head}{sep}{loop}" if head else loop


def validate_lasso(p: ProductAutomaton, lasso: Lasso) -> list[str]:
    """Problems with a lasso, empty if it is a valid accepting lasso of ``p``."""
    problems = []
    if not lasso.prefix:
        problems.append("empty prefix")
    if not lasso.cycle:
        problems.append("empty cycle")
    if problems:
        return problems
    for n in lasso.prefix + lasso.cycle:
        if n not in p:
            problems.append(f"{n} is not a product node")
    if problems:
        return problems
    if p.index(lasso.prefix[0]) not in p.initial:
        problems.append(f"prefix starts at non-initial node {lasso.prefix[0]}")
    path = list(lasso.prefix) + list(lasso.cycle) + [lasso.cycle[0]]
    for u, v in zip(path, path[1:]):
        if v not in p.successors(u):
            problems.append(f"missing edge {u} -> {v}")
    if not any(p.is_accepting(n) for n in lasso.cycle):
        problems.append("cycle has no accepting node")
    return problems


def find_accepting_lasso(p: ProductAutomaton, *, jit: bool | None = None) -> Lasso | None:
    """Accepting lasso reachable from an initial node, or None if the product is empty.

    Nested depth-first search; successors are explored in node order, so the
    result is reproducible.
    """
    prefix, cycle = _kernels.nested_dfs(p.indptr, p.indices, p.accepting, np.asarray(p.initial, dtype=np.int64), jit=jit)
    if len(cycle) == 0:
        return None
    nodes = p.nodes
    pre, cyc = fold_lasso([nodes[i] for i in prefix], [nodes[i] for i in cycle])
    return Lasso(pre, cyc)


# ---------------------------------------------------------------------------
# SCCs and dead ends


@dataclass(frozen=True)
class SCC:
    nodes: tuple[ProductNode, ...]
    trivial: bool  # single node without a self-edge

    def __contains__(self, node):
        return node in self.nodes


def scc_decomposition(p: ProductAutomaton, *, jit: bool | None = None) -> list[SCC]:
    """Maximal SCCs, sinks first (reverse topological order of the condensation)."""
    comp = _kernels.tarjan(p.indptr, p.indices, jit=jit)
    groups: dict[int, list[int]] = {}
    for i, c in enumerate(comp):
        groups.setdefault(int(c), []).append(i)
    out = []
    for c in sorted(groups):
        members = groups[c]
        trivial = len(members) == 1 and members[0] not in p.successor_ids(members[0])
        out.append(SCC(tuple(p.nodes[i] for i in members), trivial))
    return out


def fail_nodes(p: ProductAutomaton, include_materialized: bool = True) -> list[ProductNode]:
    """Nodes without outgoing product edges, in node order."""
    out = []
    for i, n in enumerate(p.nodes):
        if p.indptr[i] == p.indptr[i + 1]:
            if include_materialized or n not in p.materialized:
                out.append(n)
    return out


def exit_nodes(p: ProductAutomaton, component: Iterable) -> list[ProductNode]:
    comp = set(component)
    out = set()
    for n in comp:
        for t in p.successors(n):
            if t not in comp:
                out.add(t)
    return sorted(out)
