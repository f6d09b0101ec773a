"""Brute-force reference semantics used by the test-suite.

Nothing here calls the translation, product or search code of the package:
word evaluation works directly on the syntax tree, model checking goes through
a closure tableau of its own, and emptiness is decided by plain reachability.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .ltl import (
    And,
    Atom,
    FalseConst,
    Finally,
    Formula,
    Globally,
    Implies,
    NegAtom,
    Next,
    Not,
    Or,
    Release,
    TrueConst,
    Until,
    subformulas,
    to_text,
)

MAX_MODEL_STATES = 8


class OracleError(RuntimeError):
    pass


class OracleCapError(ValueError):
    pass


@dataclass(frozen=True)
class UltimatelyPeriodicWord:
    prefix: tuple[Mapping[str, bool], ...]
    period: tuple[Mapping[str, bool], ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")

    def __len__(self):
        return len(self.prefix) + len(self.period)

    def letters(self):
        return list(self.prefix) + list(self.period)


def _successor_index(n_prefix: int, n: int):
    return [i + 1 if i + 1 < n else n_prefix for i in range(n)]


def _value_arrays(phi: Formula, letters, succ) -> dict:
    """Truth of every subformula at every position of a lasso-shaped word."""
    n = len(letters)
    val: dict[Formula, list[bool]] = {}
    for g in subformulas(phi):
        if isinstance(g, TrueConst):
            v = [True] * n
        elif isinstance(g, FalseConst):
            v = [False] * n
        elif isinstance(g, (Atom, NegAtom)):
            try:
                v = [bool(l[g.name]) for l in letters]
            except KeyError:
                raise OracleError(f"atom {g.name} is not assigned in the word") from None
            if isinstance(g, NegAtom):
                v = [not x for x in v]
        elif isinstance(g, Not):
            v = [not x for x in val[g.operand]]
        elif isinstance(g, And):
            v = [a and b for a, b in zip(val[g.left], val[g.right])]
        elif isinstance(g, Or):
            v = [a or b for a, b in zip(val[g.left], val[g.right])]
        elif isinstance(g, Implies):
            v = [(not a) or b for a, b in zip(val[g.left], val[g.right])]
        elif isinstance(g, Next):
            a = val[g.operand]
            v = [a[succ[i]] for i in range(n)]
        else:
            # fixpoint iteration over the lasso: least for U/F, greatest for R/G
            if isinstance(g, Until):
                a, b, least = val[g.left], val[g.right], True
            elif isinstance(g, Finally):
                a, b, least = [True] * n, val[g.operand], True
            elif isinstance(g, Release):
                a, b, least = val[g.left], val[g.right], False
            elif isinstance(g, Globally):
                a, b, least = [False] * n, val[g.operand], False
            else:
                raise TypeError(f"unknown formula {g!r}")
            v = [not least] * n
            changed = True
            while changed:
                changed = False
                for i in reversed(range(n)):
                    if least:
                        new = b[i] or (a[i] and v[succ[i]])
                    else:
                        new = b[i] and (a[i] or v[succ[i]])
                    if new != v[i]:
                        v[i] = new
                        changed = True
        val[g] = v
    return val


def eval_ltl_on_word(phi: Formula, w: UltimatelyPeriodicWord) -> bool:
    """Truth of ``phi`` at position 0 of an ultimately periodic word."""
    letters = w.letters()
    succ = _successor_index(len(w.prefix), len(letters))
    return _value_arrays(phi, letters, succ)[phi][0]


def eval_all_positions(phi: Formula, w: UltimatelyPeriodicWord) -> list[bool]:
    letters = w.letters()
    succ = _successor_index(len(w.prefix), len(letters))
    return _value_arrays(phi, letters, succ)[phi]


# ---------------------------------------------------------------------------
# exhaustive words


def all_letters(atom_names: Sequence[str]) -> list[dict[str, bool]]:
    return [dict(zip(atom_names, bits)) for bits in itertools.product((False, True), repeat=len(atom_names))]


def all_words(atom_names: Sequence[str], max_len: int) -> Iterator[UltimatelyPeriodicWord]:
    """Every ultimately periodic word with prefix + period <= max_len."""
    letters = all_letters(atom_names)
    for total in range(1, max_len + 1):
        for plen in range(total):
            for seq in itertools.product(letters, repeat=total):
                yield UltimatelyPeriodicWord(tuple(seq[:plen]), tuple(seq[plen:]))


def batch_eval(phi: Formula, atom_names: Sequence[str], plen: int, qlen: int) -> np.ndarray:
    """Truth of ``phi`` on all words of one (prefix, period) shape at once.

    Words are ordered as in ``itertools.product`` over ``all_letters``; the
    result has one bool per word.
    """
    n = plen + qlen
    k = len(atom_names)
    nletters = 2 ** k
    codes = np.array(list(itertools.product(range(nletters), repeat=n)), dtype=np.int64).reshape(-1, n)
    # letter c assigns atom j the bit (k-1-j) of c, matching all_letters
    bits = {name: ((codes >> (k - 1 - j)) & 1).astype(bool) for j, name in enumerate(atom_names)}
    succ = np.array(_successor_index(plen, n))
    W = codes.shape[0]
    val: dict[Formula, np.ndarray] = {}
    for g in subformulas(phi):
        if isinstance(g, TrueConst):
            v = np.ones((W, n), bool)
        elif isinstance(g, FalseConst):
            v = np.zeros((W, n), bool)
        elif isinstance(g, Atom):
            v = bits[g.name]
        elif isinstance(g, NegAtom):
            v = ~bits[g.name]
        elif isinstance(g, Not):
            v = ~val[g.operand]
        elif isinstance(g, And):
            v = val[g.left] & val[g.right]
        elif isinstance(g, Or):
            v = val[g.left] | val[g.right]
        elif isinstance(g, Implies):
            v = ~val[g.left] | val[g.right]
        elif isinstance(g, Next):
            v = val[g.operand][:, succ]
        else:
            if isinstance(g, Until):
                a, b, least = val[g.left], val[g.right], True
            elif isinstance(g, Finally):
                a, b, least = np.ones((W, n), bool), val[g.operand], True
            elif isinstance(g, Release):
                a, b, least = val[g.left], val[g.right], False
            else:
                a, b, least = np.zeros((W, n), bool), val[g.operand], False
            v = np.full((W, n), not least)
            for _ in range(n + 1):
                v = (b | (a & v[:, succ])) if least else (b & (a | v[:, succ]))
        val[g] = v
    return val[phi][:, 0].copy()


def _bmm(a, b):
    return np.matmul(a.astype(np.float32), b.astype(np.float32)) > 0


def _bmv(v, m):
    return np.matmul(v[:, None, :].astype(np.float32), m.astype(np.float32))[:, 0, :] > 0


# ---------------------------------------------------------------------------
# automaton membership by boolean matrices (independent of the product search)


def automaton_accepts_batch(a, atom_names: Sequence[str], plen: int, qlen: int) -> np.ndarray:
    """Membership of all words of one shape in ``a``; same word order as :func:`batch_eval`."""
    from .automata import guard_eval

    letters = all_letters(atom_names)
    idx = {q: i for i, q in enumerate(a.states)}
    Q = len(a.states)
    T = np.zeros((len(letters), Q, Q), bool)
    for c, lab in enumerate(letters):
        for t in a.transitions:
            if guard_eval(t.guard, lab):
                T[c, idx[t.source], idx[t.target]] = True
    acc = np.zeros(Q, bool)
    for q in a.accepting:
        acc[idx[q]] = True
    n = plen + qlen
    codes = np.array(list(itertools.product(range(len(letters)), repeat=n)), dtype=np.int64).reshape(-1, n)
    W = codes.shape[0]
    cur = np.zeros((W, Q), bool)
    for q in a.initial:
        cur[:, idx[q]] = True
    for i in range(plen):
        cur = _bmv(cur, T[codes[:, i]])
    # over one period: R = plain reachability, RA = reachability through an accepting state
    R = np.broadcast_to(np.eye(Q, dtype=bool), (W, Q, Q)).copy()
    RA = np.zeros((W, Q, Q), bool)
    for i in range(plen, n):
        step = T[codes[:, i]]
        # leaving state q reads the letter; acceptance counts the state being left
        hit = R & acc[None, None, :]
        RA = _bmm(RA | hit, step)
        R = _bmm(R, step)
    # closure of the period graph
    C = R | RA
    reach = C | np.eye(Q, dtype=bool)[None]
    for _ in range(max(1, int(np.ceil(np.log2(Q + 1))) + 1)):
        reach = reach | _bmm(reach, reach)
    # reachable period-boundary states, then a cycle through an accepting segment
    start = _bmv(cur, reach)
    # exists p reachable, RA[p, r], reach[r, p]
    cyc = (RA & np.swapaxes(reach, 1, 2)).any(axis=2)
    return (start & cyc).any(axis=1)


# ---------------------------------------------------------------------------
# lassos of a model


def enumerate_lassos(m, max_len: int, start=None) -> Iterator[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Every (stem, cycle) path with len(stem)+len(cycle) <= max_len.

    The cycle's last state has a transition back to its first.
    """
    starts = list(m.initial) if start is None else [start]

    def extend(path):
        n = len(path)
        last = path[-1]
        succ = m.successors(last)
        for k in range(n):
            if path[k] in succ:
                yield tuple(path[:k]), tuple(path[k:])
        if n < max_len:
            for t in succ:
                yield from extend(path + [t])

    for s in starts:
        yield from extend([s])


def lasso_word(m, stem, cycle) -> UltimatelyPeriodicWord:
    return UltimatelyPeriodicWord(tuple(m.label(s) for s in stem), tuple(m.label(s) for s in cycle))


# ---------------------------------------------------------------------------
# model checking through a closure tableau


@dataclass(frozen=True)
class ModelCheckResult:
    holds: bool
    counterexample: tuple[tuple[str, ...], tuple[str, ...]] | None = None


def model_satisfies(m, phi: Formula, *, with_witness: bool = False):
    """Whether every path from every initial state of ``m`` satisfies ``phi``.

    Searches the graph of (state, valuation of the temporal subformulas)
    pairs that respect the expansion laws for a reachable SCC that fulfils
    every pending eventuality; such an SCC is exactly a violating path. Any
    violation found is turned into a lasso and re-checked with
    :func:`eval_ltl_on_word` before it is reported.
    """
    if len(m.states) > MAX_MODEL_STATES:
        raise OracleCapError(f"model has {len(m.states)} states; the oracle handles at most {MAX_MODEL_STATES}")
    result = _tableau_check(m, phi)
    if result.counterexample is not None:
        stem, cycle = result.counterexample
        if eval_ltl_on_word(phi, lasso_word(m, stem, cycle)):
            raise OracleError(f"tableau witness {stem}{cycle}^w does not violate {to_text(phi)}")
    return result if with_witness else result.holds


def exists_path(m, psi: Formula) -> bool:
    """Some path from an initial state satisfies ``psi``."""
    return _tableau_check(m, Not(psi)).counterexample is not None


def _tableau_check(m, phi: Formula) -> ModelCheckResult:
    subs = subformulas(phi)
    temporal = [g for g in subs if isinstance(g, (Next, Finally, Globally, Until, Release))]
    tpos = {g: i for i, g in enumerate(temporal)}
    k = len(temporal)

    def local(state, mask):
        lab = m.label(state)
        val = {}
        for g in subs:
            if g in tpos:
                v = bool(mask >> tpos[g] & 1)
            elif isinstance(g, TrueConst):
                v = True
            elif isinstance(g, FalseConst):
                v = False
            elif isinstance(g, Atom):
                v = bool(lab[g.name])
            elif isinstance(g, NegAtom):
                v = not lab[g.name]
            elif isinstance(g, Not):
                v = not val[g.operand]
            elif isinstance(g, And):
                v = val[g.left] and val[g.right]
            elif isinstance(g, Or):
                v = val[g.left] or val[g.right]
            elif isinstance(g, Implies):
                v = (not val[g.left]) or val[g.right]
            else:
                raise TypeError(g)
            val[g] = v
        return val

    cache = {}

    def vals(node):
        if node not in cache:
            cache[node] = local(*node)
        return cache[node]

    def consistent_now(v):
        # laws that constrain a single position
        for g in temporal:
            x = v[g]
            if isinstance(g, Until):
                if v[g.right] and not x:
                    return False
                if x and not (v[g.left] or v[g.right]):
                    return False
            elif isinstance(g, Finally):
                if v[g.operand] and not x:
                    return False
            elif isinstance(g, Globally):
                if x and not v[g.operand]:
                    return False
            elif isinstance(g, Release):
                if x and not v[g.right]:
                    return False
                if v[g.left] and v[g.right] and not x:
                    return False
        return True

    def edge_ok(v, w):
        for g in temporal:
            x = v[g]
            if isinstance(g, Next):
                want = w[g.operand]
            elif isinstance(g, Until):
                want = v[g.right] or (v[g.left] and w[g])
            elif isinstance(g, Finally):
                want = v[g.operand] or w[g]
            elif isinstance(g, Globally):
                want = v[g.operand] and w[g]
            else:
                want = v[g.right] and (v[g.left] or w[g])
            if x != want:
                return False
        return True

    masks = range(2 ** k)
    ok_masks = {s: [mk for mk in masks if consistent_now(vals((s, mk)))] for s in m.states}

    # eventualities that must be fulfilled infinitely often: (holds-pending, fulfilled)
    def fulfilled(g, v):
        if isinstance(g, Until):
            return (not v[g]) or v[g.right]
        if isinstance(g, Finally):
            return (not v[g]) or v[g.operand]
        if isinstance(g, Globally):
            return v[g] or (not v[g.operand])
        if isinstance(g, Release):
            return v[g] or (not v[g.right])
        return True

    eventualities = [g for g in temporal if not isinstance(g, Next)]

    roots = [(s, mk) for s in sorted(m.initial) for mk in ok_masks[s] if not vals((s, mk))[phi]]
    succ: dict = {}
    order = []
    seen = set(roots)
    todo = list(roots)
    while todo:
        node = todo.pop()
        order.append(node)
        v = vals(node)
        out = []
        for t in m.successors(node[0]):
            for mk in ok_masks[t]:
                w = vals((t, mk))
                if edge_ok(v, w):
                    out.append((t, mk))
        succ[node] = out
        for x in out:
            if x not in seen:
                seen.add(x)
                todo.append(x)

    for comp in _sccs(order, succ):
        cs = set(comp)
        if len(comp) == 1 and comp[0] not in succ[comp[0]]:
            continue
        targets = []
        good = True
        for g in eventualities:
            hits = [n for n in comp if fulfilled(g, vals(n))]
            if not hits:
                good = False
                break
            targets.append(hits[0])
        if not good:
            continue
        stem_nodes = _path(roots, lambda n: n in cs, succ)
        entry = stem_nodes[-1]
        cycle_nodes = [entry]
        cur = entry
        for tgt in targets + [entry]:
            seg = _path([cur], lambda n, tgt=tgt: n == tgt, succ, inside=cs, nonempty=True)
            cycle_nodes.extend(seg[1:])
            cur = tgt
        cycle_nodes = cycle_nodes[:-1]
        stem = tuple(n[0] for n in stem_nodes[:-1])
        cycle = tuple(n[0] for n in cycle_nodes)
        return ModelCheckResult(False, (stem, cycle))
    return ModelCheckResult(True)


def _path(starts, goal, succ, inside=None, nonempty=False):
    """Shortest path (list of nodes) from one of ``starts`` to a goal node (BFS)."""
    parent = {}
    frontier = []
    for s in starts:
        parent[s] = None
        if goal(s) and not nonempty:
            return [s]
        frontier.append(s)
    while frontier:
        nxt = []
        for n in frontier:
            for t in succ[n]:
                if inside is not None and t not in inside:
                    continue
                if goal(t):
                    path = [t, n]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return path[::-1]
                if t not in parent:
                    parent[t] = n
                    nxt.append(t)
        frontier = nxt
    raise OracleError("no path found inside a strongly connected set")


def _sccs(nodes, succ):
    index, low, stack, on, out = {}, {}, [], set(), []
    counter = [0]

    def strong(v):
        work = [(v, iter(succ[v]))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        while work:
            u, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ[w])))
                    break
                if w in on:
                    low[u] = min(low[u], index[w])
            else:
                work.pop()
                if work:
                    low[work[-1][0]] = min(low[work[-1][0]], low[u])
                if low[u] == index[u]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on.discard(w)
                        comp.append(w)
                        if w == u:
                            break
                    out.append(comp)

    for v in nodes:
        if v not in index:
            strong(v)
    return out


# ---------------------------------------------------------------------------
# product emptiness by reachability


def brute_force_nonempty(p) -> bool:
    """Some reachable accepting node lies on a cycle."""
    n = len(p.nodes)
    adj = [list(map(int, p.successor_ids(i))) for i in range(n)]
    reach = set(p.initial)
    todo = list(p.initial)
    while todo:
        i = todo.pop()
        for j in adj[i]:
            if j not in reach:
                reach.add(j)
                todo.append(j)
    for i in sorted(reach):
        if not p.is_accepting(p.nodes[i]):
            continue
        seen = set()
        todo = list(adj[i])
        while todo:
            j = todo.pop()
            if j == i:
                return True
            if j not in seen:
                seen.add(j)
                todo.extend(adj[j])
    return False


def completions_report(m, phi: Formula, cap: int = 20):
    """(completion, satisfies) for every completion of a partial structure."""
    from .pks import enumerate_completions

    return [(c, model_satisfies(c, phi)) for c in enumerate_completions(m, cap)]
