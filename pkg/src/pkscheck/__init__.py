"""Three-valued LTL model checking of partial Kripke structures, with
counterexamples and checkable deductive proofs."""

__version__ = "0.1.0"

from .automata import BuchiAutomaton, ltl_to_buchi  # noqa: E402
from .engine import Value, Verdict, check  # noqa: E402
from .ltl import parse_ltl, to_nnf, to_text  # noqa: E402
from .pks import KripkeStructure, PartialKripkeStructure, ThreeValue  # noqa: E402
from .proof import Proof, check_proof, generate_proof  # noqa: E402

__all__ = [
    "BuchiAutomaton", "KripkeStructure", "PartialKripkeStructure", "Proof", "ThreeValue", "Value",
    "Verdict", "check", "check_proof", "generate_proof", "ltl_to_buchi", "parse_ltl", "to_nnf", "to_text",
]
