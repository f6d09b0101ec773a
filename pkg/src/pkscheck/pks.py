"""Partial Kripke structures, their completions and approximations."""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .ltl import bar, is_barred

STATE_ID_RE = re.compile(r"[A-Za-z0-9_]+\Z")
DEFAULT_COMPLETION_CAP = 20


class ThreeValue(enum.Enum):
    T = "T"
    F = "F"
    U = "U"

    def comp(self) -> "ThreeValue":
        return _COMP[self]

    __invert__ = comp

    def meet(self, other: "ThreeValue") -> "ThreeValue":
        if ThreeValue.F in (self, other):
            return ThreeValue.F
        if ThreeValue.U in (self, other):
            return ThreeValue.U
        return ThreeValue.T

    def join(self, other: "ThreeValue") -> "ThreeValue":
        if ThreeValue.T in (self, other):
            return ThreeValue.T
        if ThreeValue.U in (self, other):
            return ThreeValue.U
        return ThreeValue.F

    def info_leq(self, other: "ThreeValue") -> bool:
        """Information order: U is below both T and F."""
        return self is ThreeValue.U or self is other

    @classmethod
    def of(cls, value: bool) -> "ThreeValue":
        return cls.T if value else cls.F


_COMP = {ThreeValue.T: ThreeValue.F, ThreeValue.F: ThreeValue.T, ThreeValue.U: ThreeValue.U}


class CompletionCapError(ValueError):
    pass


class AlreadyClosedError(ValueError):
    pass


@dataclass(frozen=True)
class _Structure:
    atoms: tuple[str, ...]
    states: tuple[str, ...]
    initial: tuple[str, ...]
    transitions: tuple[tuple[str, str], ...]
    labels: Mapping[str, Mapping[str, object]]
    _succ: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        succ: dict[str, list[str]] = {s: [] for s in self.states}
        for a, b in self.transitions:
            if a in succ and b not in succ[a]:
                succ[a].append(b)
        object.__setattr__(self, "_succ", {s: tuple(sorted(v)) for s, v in succ.items()})

    def successors(self, state: str) -> tuple[str, ...]:
        return self._succ.get(state, ())

    def is_complement_closed(self) -> bool:
        return any(is_barred(p) for p in self.atoms)


@dataclass(frozen=True)
class PartialKripkeStructure(_Structure):
    """Kripke structure whose labels are three-valued.

    ``labels[s][p]`` is a :class:`ThreeValue`.
    """

    def value(self, state: str, atom: str) -> ThreeValue:
        return self.labels[state][atom]

    def unknowns(self) -> list[tuple[str, str]]:
        """(state, atom) pairs labelled U, unbarred atoms only, in enumeration order."""
        return sorted(
            (s, p)
            for s in self.states
            for p in self.atoms
            if not is_barred(p) and self.labels.get(s, {}).get(p) is ThreeValue.U
        )


@dataclass(frozen=True)
class KripkeStructure(_Structure):
    """Classical Kripke structure; ``labels[s][p]`` is a bool."""

    def value(self, state: str, atom: str) -> bool:
        return self.labels[state][atom]

    def label(self, state: str) -> Mapping[str, bool]:
        return self.labels[state]


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    where: str = ""

    def __str__(self):
        return f"{self.kind}: {self.message}"


def validate(m: _Structure) -> list[Violation]:
    """Every broken structural invariant, as data. Empty means valid."""
    out: list[Violation] = []
    known = set()
    for s in m.states:
        if not isinstance(s, str) or not STATE_ID_RE.match(s):
            out.append(Violation("bad-state-id", f"state id {s!r} is not of the form [A-Za-z0-9_]+", str(s)))
        if s in known:
            out.append(Violation("duplicate-state", f"state {s} declared twice", s))
        known.add(s)
    if not m.initial:
        out.append(Violation("no-initial-state", "the initial-state set is empty"))
    for s in m.initial:
        if s not in known:
            out.append(Violation("unknown-initial-state", f"initial state {s} is not declared", s))
    for a, b in m.transitions:
        if a not in known or b not in known:
            missing = a if a not in known else b
            out.append(Violation("dangling-transition", f"transition {a} -> {b} references undeclared state {missing}", f"{a}->{b}"))
    for s in m.states:
        if not any(a == s and b in known for a, b in m.transitions):
            out.append(Violation("non-total-state", f"non-total state {s}: no successors", s))
    atom_set = set(m.atoms)
    for s in m.states:
        lab = m.labels.get(s, {})
        for p in m.atoms:
            if p not in lab:
                out.append(Violation("undefined-label", f"state {s} has no value for {p}", f"{s}.{p}"))
        for p in lab:
            if p not in atom_set:
                out.append(Violation("unknown-atom", f"state {s} labels undeclared atom {p}", f"{s}.{p}"))
    if m.is_complement_closed():
        for p in m.atoms:
            if bar(p) not in atom_set:
                out.append(Violation("complement-mismatch", f"atom {p} has no complement partner {bar(p)}", p))
        for s in m.states:
            lab = m.labels.get(s, {})
            for p in m.atoms:
                if is_barred(p) or p not in lab or bar(p) not in lab:
                    continue
                if _complement(lab[p]) != lab[bar(p)]:
                    out.append(Violation(
                        "complement-mismatch",
                        f"complement mismatch at {s}: {p}={_show(lab[p])} but {bar(p)}={_show(lab[bar(p)])}",
                        f"{s}.{bar(p)}",
                    ))
    return out


def _complement(v):
    if isinstance(v, ThreeValue):
        return v.comp()
    return not v


def _show(v):
    if isinstance(v, ThreeValue):
        return v.value
    return "T" if v else "F"


def complement_close(m: PartialKripkeStructure) -> PartialKripkeStructure:
    """Add a barred partner ``p~`` for every atom ``p`` with the complemented value."""
    if m.is_complement_closed():
        raise AlreadyClosedError("structure already contains complement atoms")
    atoms = tuple(m.atoms) + tuple(bar(p) for p in m.atoms)
    labels = {}
    for s in m.states:
        lab = dict(m.labels[s])
        for p in m.atoms:
            lab[bar(p)] = lab[p].comp()
        labels[s] = lab
    return PartialKripkeStructure(atoms, m.states, m.initial, m.transitions, labels)


def _approximate(m: PartialKripkeStructure, unknown_as: bool) -> KripkeStructure:
    labels = {
        s: {p: (unknown_as if v is ThreeValue.U else v is ThreeValue.T) for p, v in m.labels[s].items()}
        for s in m.states
    }
    return KripkeStructure(m.atoms, m.states, m.initial, m.transitions, labels)


def pessimistic(m: PartialKripkeStructure) -> KripkeStructure:
    """Every U becomes F, barred atoms included."""
    return _approximate(m, False)


def optimistic(m: PartialKripkeStructure) -> KripkeStructure:
    """Every U becomes T, barred atoms included."""
    return _approximate(m, True)


def enumerate_completions(m: PartialKripkeStructure, cap: int = DEFAULT_COMPLETION_CAP) -> Iterator[KripkeStructure]:
    """All classical completions, lazily.

    Unknowns are ordered by (state, atom); the first unknown varies slowest and
    F comes before T. Barred atoms follow their partner.
    """
    unknowns = m.unknowns()
    if len(unknowns) > cap:
        raise CompletionCapError(f"{len(unknowns)} unknown (state, atom) pairs exceed the cap of {cap}")
    atom_set = set(m.atoms)
    for bits in itertools.product((False, True), repeat=len(unknowns)):
        choice = dict(zip(unknowns, bits))
        labels = {}
        for s in m.states:
            lab = {}
            for p, v in m.labels[s].items():
                if is_barred(p) and bar(p) in atom_set:
                    continue
                lab[p] = choice[(s, p)] if v is ThreeValue.U else v is ThreeValue.T
            for p in list(lab):
                if bar(p) in atom_set:
                    lab[bar(p)] = not lab[p]
            for p, v in m.labels[s].items():
                # orphan barred atoms (no partner) are completed like ordinary atoms
                if p not in lab:
                    lab[p] = v is ThreeValue.T
            labels[s] = lab
        yield KripkeStructure(m.atoms, m.states, m.initial, m.transitions, labels)


def count_completions(m: PartialKripkeStructure) -> int:
    return 2 ** len(m.unknowns())


def reachable_states(m: _Structure) -> list[str]:
    seen = set(m.initial)
    todo = list(m.initial)
    while todo:
        s = todo.pop()
        for t in m.successors(s):
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return sorted(seen)
