import dataclasses
import random

import pytest

from pkscheck.engine import ModelValidationError, UnknownAtomError, Value, check, negated_closed_property
from pkscheck.ltl import And, Finally, Globally, NegAtom, parse_ltl
from pkscheck.oracle import model_satisfies
from pkscheck.pks import PartialKripkeStructure, ThreeValue, complement_close, enumerate_completions
from pkscheck.proof import check_proof

import gen

PSI3 = "G(edb -> F(cert | fl))"
T, F, U = ThreeValue.T, ThreeValue.F, ThreeValue.U


def relabel(m, state, atom, value):
    labels = {s: dict(l) for s, l in m.labels.items()}
    labels[state][atom] = value
    return dataclasses.replace(m, labels=labels)


class TestVerdicts:
    def test_stereo_maybe(self, stereo, a_ref):
        v = check(stereo, PSI3, a_ref)
        assert v.value is Value.MAYBE
        assert v.lasso_source == "pessimistic" and v.proof_source == "optimistic"
        assert v.lasso.states() == (("s0", "s2", "s5"), ("s7",))
        assert check_proof(v.optimistic_run.product, v.proof).accepted

    def test_stereo_maybe_with_translation(self, stereo):
        v = check(stereo, PSI3)
        assert v.value is Value.MAYBE
        assert v.lasso.states() == (("s0", "s2", "s5"), ("s7",))
        assert check_proof(v.optimistic_run.product, v.proof).accepted

    def test_u_free_true(self):
        m = PartialKripkeStructure(("p",), ("s0", "s1"), ("s0",), (("s0", "s1"), ("s1", "s1")),
                                   {"s0": {"p": F}, "s1": {"p": T}})
        v = check(m, "F G p")
        assert v.value is Value.TRUE
        assert v.lasso is None and v.proof is not None
        assert v.proof_source == "pessimistic"
        assert check_proof(v.pessimistic_run.product, v.proof).accepted

    def test_trivially_true(self, stereo):
        v = check(stereo, "true")
        assert v.value is Value.TRUE

    def test_cert_flip_false(self, stereo):
        m = relabel(stereo, "s7", "cert", T)
        v = check(m, "G(!cert)")
        assert v.value is Value.FALSE
        assert v.lasso_source == "optimistic" and v.proof is None
        assert all(not model_satisfies(c, parse_ltl("G(!cert)")) for c in enumerate_completions(m))

    def test_order_independent(self, stereo):
        for prop in (PSI3, "G(!cert)", "F sl", "G(fl | !fl)"):
            a = check(stereo, prop, pessimistic_first=True)
            b = check(stereo, prop, pessimistic_first=False)
            assert a.value is b.value

    def test_maybe_with_agreeing_completions(self):
        # three-valued semantics is weaker than completion semantics: every
        # completion satisfies p | !p, yet the verdict is maybe
        m = PartialKripkeStructure(("p",), ("s0",), ("s0",), (("s0", "s0"),), {"s0": {"p": U}})
        phi = parse_ltl("p | !p")
        assert check(m, phi).value is Value.MAYBE
        assert all(model_satisfies(c, phi) for c in enumerate_completions(m))


class TestInputs:
    def test_unknown_atom(self, stereo):
        with pytest.raises(UnknownAtomError):
            check(stereo, "G(zzz)")

    def test_barred_atom_in_property(self, stereo):
        with pytest.raises(UnknownAtomError):
            check(stereo, "G(fl~)")

    def test_invalid_model(self, stereo):
        bad = dataclasses.replace(stereo, transitions=stereo.transitions[:-1])
        with pytest.raises(ModelValidationError, match="non-total"):
            check(bad, PSI3)

    def test_closed_model_rejected(self, stereo):
        with pytest.raises(ModelValidationError):
            check(complement_close(stereo), PSI3)

    def test_negated_closed_property(self):
        got = negated_closed_property(parse_ltl(PSI3))
        # closing first keeps the property positive; its negation then reads
        # the approximations classically
        assert got == Finally(And(NegAtom("edb~"), Globally(And(NegAtom("cert"), NegAtom("fl")))))


class TestSoundness:
    @pytest.mark.parametrize("seed", range(40))
    def test_definite_verdicts_agree_with_completions(self, seed):
        rng = random.Random(seed)
        m = gen.pks(rng)
        phi = gen.formula(rng, m.atoms, 3)
        v = check(m, phi)
        results = {model_satisfies(c, phi) for c in enumerate_completions(m)}
        if v.value is Value.TRUE:
            assert results == {True}
        elif v.value is Value.FALSE:
            assert results == {False}
