"""Three-valued verdicts from two classical runs."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .automata import BuchiAutomaton, ltl_to_buchi
from .ltl import Formula, atoms, complement_close_formula, is_barred, negate, parse_ltl, to_nnf, to_text
from .pks import PartialKripkeStructure, complement_close, optimistic, pessimistic, validate
from .product import Lasso, ProductAutomaton, find_accepting_lasso, intersect
from .proof import Proof, generate_proof


class Value(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    MAYBE = "maybe"


class ModelValidationError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class UnknownAtomError(ValueError):
    pass


@dataclass(frozen=True)
class Run:
    """One classical run on an approximation."""

    approximation: str  # "pessimistic" or "optimistic"
    product: ProductAutomaton
    lasso: Lasso | None


@dataclass(frozen=True)
class Verdict:
    value: Value
    lasso: Lasso | None
    proof: Proof | None
    lasso_source: str | None
    proof_source: str | None
    prop: Formula
    automaton: BuchiAutomaton
    pessimistic_run: Run
    optimistic_run: Run


def negated_closed_property(phi: Formula) -> Formula:
    """Negation of the complement-closed property, in NNF.

    The property is closed first (``!p`` becomes ``p~``) and only then negated,
    so the automaton checks the positive closed formula classically on each
    approximation.
    """
    return negate(complement_close_formula(to_nnf(phi)))


def combine(pes: Run, opt: Run) -> tuple[Value, str | None, str | None]:
    """(value, lasso source, proof source) from the two runs' emptiness results."""
    if pes.lasso is None:
        return Value.TRUE, None, "pessimistic"
    if opt.lasso is not None:
        return Value.FALSE, "optimistic", None
    return Value.MAYBE, "pessimistic", "optimistic"


def check(m: PartialKripkeStructure, phi: Formula | str, automaton: BuchiAutomaton | None = None,
          *, pessimistic_first: bool = True) -> Verdict:
    """Three-valued model check of ``phi`` on ``m``.

    ``automaton``, if given, replaces the translation of the negated closed
    property; it must accept exactly the violations of the closed property on
    complete structures.
    """
    if isinstance(phi, str):
        phi = parse_ltl(phi)
    problems = validate(m)
    if problems:
        raise ModelValidationError(problems)
    if m.is_complement_closed():
        raise ModelValidationError(["model already contains complement atoms; supply the unclosed model"])
    unknown = sorted(p for p in atoms(phi) if p not in m.atoms or is_barred(p))
    if unknown:
        raise UnknownAtomError(f"property uses atoms not in the model: {', '.join(unknown)}")

    closed = complement_close(m)
    if automaton is None:
        automaton = ltl_to_buchi(negated_closed_property(phi))

    def run(name):
        approx = pessimistic(closed) if name == "pessimistic" else optimistic(closed)
        prod = intersect(approx, automaton)
        return Run(name, prod, find_accepting_lasso(prod))

    order = ("pessimistic", "optimistic") if pessimistic_first else ("optimistic", "pessimistic")
    runs = {name: run(name) for name in order}
    pes, opt = runs["pessimistic"], runs["optimistic"]
    value, lasso_src, proof_src = combine(pes, opt)
    lasso = runs[lasso_src].lasso if lasso_src else None
    proof = generate_proof(runs[proof_src].product, to_text(phi)) if proof_src else None
    return Verdict(value, lasso, proof, lasso_src, proof_src, phi, automaton, pes, opt)
