import dataclasses
import random

import numpy as np
import pytest

from pkscheck.automata import UnassignedAtomError, guard_eval, ltl_to_buchi, reference_automaton
from pkscheck.ltl import (
    FALSE, TRUE, And, Atom, Globally, NegAtom, Or, negate, parse_ltl, to_nnf,
)
from pkscheck.oracle import automaton_accepts_batch, batch_eval

import gen

STEREO_ATOMS = ("edb", "cert", "fl")


def _shapes(max_len):
    return [(plen, total - plen) for total in range(1, max_len + 1) for plen in range(total)]


def _from(a, q):
    return dataclasses.replace(a, initial=(q,))


class TestGuardEval:
    def test_enabling_condition(self):
        g = And(NegAtom("cert"), NegAtom("fl"))
        assert guard_eval(g, {"cert": False, "fl": False, "edb": True})

    def test_true(self):
        assert guard_eval(TRUE, {})
        assert not guard_eval(FALSE, {"p": True})

    def test_atom(self):
        assert not guard_eval(Atom("edb"), {"edb": False, "cert": True})
        assert guard_eval(Or(Atom("p"), Atom("q")), {"p": False, "q": True})

    def test_unassigned(self):
        with pytest.raises(UnassignedAtomError):
            guard_eval(Atom("p"), {"q": True})

    def test_temporal_guard_rejected(self):
        with pytest.raises(TypeError):
            guard_eval(Globally(Atom("p")), {"p": True})


class TestTranslation:
    def test_globally_literal(self):
        a = ltl_to_buchi(Globally(Atom("p")))
        assert a.states == ("q0",)
        assert a.initial == ("q0",)
        assert a.accepting == {"q0"}
        assert [(t.source, t.guard, t.target) for t in a.transitions] == [("q0", Atom("p"), "q0")]

    def test_false_is_empty(self):
        a = ltl_to_buchi(FALSE)
        for plen, qlen in _shapes(3):
            assert not automaton_accepts_batch(a, ("p",), plen, qlen).any()

    def test_true_is_universal(self):
        a = ltl_to_buchi(TRUE)
        for plen, qlen in _shapes(3):
            assert automaton_accepts_batch(a, ("p",), plen, qlen).all()

    def test_requires_nnf(self):
        with pytest.raises(ValueError):
            ltl_to_buchi(parse_ltl("!G p"))

    def test_initial_eta_is_input(self):
        phi = to_nnf(parse_ltl("G(p -> F q)"))
        a = ltl_to_buchi(phi)
        assert [a.eta[q] for q in a.initial] == [phi]

    def test_deterministic(self):
        phi = to_nnf(parse_ltl("G(p -> F q) & (r U q)"))
        assert ltl_to_buchi(phi) == ltl_to_buchi(phi)

    def test_barred_atoms(self):
        a = ltl_to_buchi(parse_ltl("G(edb~ | F(cert | fl))"))
        assert "edb~" in a.guard_atoms()


class TestAnnotations:
    @pytest.mark.parametrize("seed", range(25))
    def test_mu_is_negated_eta(self, seed):
        a = ltl_to_buchi(to_nnf(gen.formula(random.Random(seed), ("p", "q"), 3)))
        for q in a.states:
            assert a.mu[q] == to_nnf(negate(a.eta[q]))

    @pytest.mark.parametrize("seed", range(25))
    def test_eta_is_language_of_state(self, seed):
        names = ("p", "q", "r")
        a = ltl_to_buchi(to_nnf(gen.formula(random.Random(seed), names, 3)))
        for q in a.states:
            for plen, qlen in _shapes(4):
                got = automaton_accepts_batch(_from(a, q), names, plen, qlen)
                assert np.array_equal(got, batch_eval(a.eta[q], names, plen, qlen)), (q, plen, qlen)


class TestReference:
    def test_pinned_document_matches(self, a_ref):
        assert a_ref == reference_automaton()

    def test_reference_language(self, a_ref):
        # the pinned automaton accepts F(edb & X G(!cert & !fl)) under the
        # source-label reading
        phi = to_nnf(parse_ltl("F(edb & X G(!cert & !fl))"))
        mine = ltl_to_buchi(phi)
        for plen, qlen in _shapes(5):
            want = batch_eval(phi, STEREO_ATOMS, plen, qlen)
            assert np.array_equal(automaton_accepts_batch(a_ref, STEREO_ATOMS, plen, qlen), want)
            assert np.array_equal(automaton_accepts_batch(mine, STEREO_ATOMS, plen, qlen), want)

    def test_reference_annotations(self, a_ref):
        for q in a_ref.states:
            for plen, qlen in _shapes(4):
                got = automaton_accepts_batch(_from(a_ref, q), STEREO_ATOMS, plen, qlen)
                assert np.array_equal(got, batch_eval(a_ref.eta[q], STEREO_ATOMS, plen, qlen))

    def test_reference_differs_from_negated_property(self, a_ref):
        # the pinned automaton is strictly weaker than the negated property:
        # edb & cert at one position followed by quiet positions is accepted
        phi = negate(parse_ltl("G(edb -> F(cert | fl))"))
        ref = automaton_accepts_batch(a_ref, STEREO_ATOMS, 1, 1)
        exact = batch_eval(phi, STEREO_ATOMS, 1, 1)
        assert (exact <= ref).all()
        assert (ref & ~exact).any()
