import random

import numpy as np
import pytest

from pkscheck.automata import ltl_to_buchi
from pkscheck.ltl import Atom, FALSE, Globally, TRUE, Finally, negate, parse_ltl, subformulas, to_nnf
from pkscheck.oracle import (
    OracleCapError, OracleError, UltimatelyPeriodicWord, all_words, automaton_accepts_batch, batch_eval,
    enumerate_lassos, eval_all_positions, eval_ltl_on_word, exists_path, lasso_word, model_satisfies,
)
from pkscheck.pks import KripkeStructure, complement_close, optimistic, pessimistic

import gen

PSI3 = parse_ltl("G(edb -> F(cert | fl))")


def word(prefix, period):
    return UltimatelyPeriodicWord(tuple({"p": b} for b in prefix), tuple({"p": b} for b in period))


class TestWordEvaluation:
    def test_stereo_path_violates(self, stereo):
        pes = pessimistic(complement_close(stereo))
        w = lasso_word(pes, ("s0", "s2", "s5"), ("s7",))
        assert eval_ltl_on_word(PSI3, w) is False

    def test_globally_true(self):
        assert eval_ltl_on_word(Globally(TRUE), word([], [False]))

    def test_eventually_missing(self):
        assert not eval_ltl_on_word(Finally(Atom("p")), word([False, False], [False, False]))

    def test_eventually_in_period(self):
        assert eval_ltl_on_word(Finally(Atom("p")), word([False], [False, True]))

    def test_positions(self):
        assert eval_all_positions(parse_ltl("X p"), word([False, True], [False])) == [True, False, False]

    def test_until_release(self):
        w = word([True, True], [False])
        assert not eval_ltl_on_word(parse_ltl("p U false"), w)
        assert eval_ltl_on_word(parse_ltl("false R !p"), word([], [False]))
        assert eval_ltl_on_word(parse_ltl("(!p) U (!p & X !p)"), w) is False
        assert eval_ltl_on_word(parse_ltl("p U !p"), w)

    def test_unassigned_atom(self):
        with pytest.raises(OracleError):
            eval_ltl_on_word(Atom("q"), word([], [True]))

    def test_empty_period(self):
        with pytest.raises(ValueError):
            UltimatelyPeriodicWord((), ())

    @pytest.mark.parametrize("seed", range(20))
    def test_batch_matches_scalar(self, seed):
        phi = gen.formula(random.Random(seed), ("p", "q"), 3)
        words = [w for w in all_words(("p", "q"), 3) if len(w.prefix) == 1 and len(w.period) == 2]
        got = batch_eval(phi, ("p", "q"), 1, 2)
        assert got.tolist() == [eval_ltl_on_word(phi, w) for w in words]

    @pytest.mark.parametrize("seed", range(20))
    def test_cross_check_with_automaton(self, seed):
        names = ("p", "q")
        phi = to_nnf(gen.formula(random.Random(seed), names, 3))
        a = ltl_to_buchi(phi)
        for total in range(1, 5):
            for plen in range(total):
                assert np.array_equal(batch_eval(phi, names, plen, total - plen),
                                      automaton_accepts_batch(a, names, plen, total - plen))


class TestModelSatisfies:
    def test_stereo_approximations(self, stereo):
        c = complement_close(stereo)
        assert model_satisfies(optimistic(c), PSI3)
        assert not model_satisfies(pessimistic(c), PSI3)

    def test_true(self, stereo):
        assert model_satisfies(pessimistic(stereo), TRUE)
        assert not model_satisfies(pessimistic(stereo), FALSE)

    def test_witness(self, stereo):
        r = model_satisfies(pessimistic(complement_close(stereo)), PSI3, with_witness=True)
        assert not r.holds
        stem, cycle = r.counterexample
        assert not eval_ltl_on_word(PSI3, lasso_word(pessimistic(stereo), stem, cycle))

    def test_cap(self):
        states = tuple(f"s{i}" for i in range(9))
        m = KripkeStructure(("p",), states, ("s0",), tuple((s, s) for s in states), {s: {"p": True} for s in states})
        with pytest.raises(OracleCapError):
            model_satisfies(m, TRUE)

    @pytest.mark.parametrize("seed", range(40))
    def test_negation_symmetry(self, seed):
        rng = random.Random(seed)
        m = gen.kripke(rng)
        phi = gen.formula(rng, m.atoms, 3)
        assert model_satisfies(m, phi) == (not exists_path(m, negate(phi)))

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_lasso_enumeration(self, seed):
        rng = random.Random(seed)
        m = gen.kripke(rng, rng.randint(1, 2), ("p", "q"))
        phi = gen.formula(rng, m.atoms, 2)
        bound = len(m.states) * (len(subformulas(phi)) + 1)
        violated = any(not eval_ltl_on_word(phi, lasso_word(m, stem, cyc))
                       for stem, cyc in enumerate_lassos(m, min(bound, 10)))
        assert model_satisfies(m, phi) == (not violated)


class TestLassos:
    def test_enumeration(self):
        m = KripkeStructure(("p",), ("a", "b"), ("a",), (("a", "b"), ("b", "a"), ("b", "b")),
                            {"a": {"p": True}, "b": {"p": False}})
        got = set(enumerate_lassos(m, 3))
        assert (("a",), ("b",)) in got
        assert ((), ("a", "b")) in got
        assert all(len(s) + len(c) <= 3 for s, c in got)
