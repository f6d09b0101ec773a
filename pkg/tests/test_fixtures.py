import dataclasses

from pkscheck.fixtures import expected, fixture_path, proof_skeleton, verify_fixture
from pkscheck.pks import ThreeValue, validate


def relabel(m, state, atom, value):
    labels = {s: dict(l) for s, l in m.labels.items()}
    labels[state][atom] = value
    return dataclasses.replace(m, labels=labels)


class TestStereo:
    def test_shape(self, stereo):
        assert stereo.states == tuple(f"s{i}" for i in range(8))
        assert stereo.initial == ("s0",)
        assert stereo.atoms == ("edb", "cert", "fl", "sl")
        assert {s: stereo.successors(s) for s in stereo.states} == {
            "s0": ("s1", "s2"), "s1": ("s1",), "s2": ("s3", "s4", "s5"), "s3": ("s3",),
            "s4": ("s4",), "s5": ("s6", "s7"), "s6": ("s6",), "s7": ("s7",),
        }
        assert validate(stereo) == []

    def test_unknowns_are_fl_and_sl(self, stereo):
        assert stereo.unknowns() == [("s6", "fl"), ("s6", "sl"), ("s7", "fl"), ("s7", "sl")]

    def test_files_ship(self):
        for name in ("stereo.pks", "a_ref.ba", "expected.json", "README.md"):
            assert fixture_path(name).is_file()


class TestReplay:
    def test_full_replay(self):
        report = verify_fixture()
        assert report.ok, str(report)
        assert [a.name for a in report.assertions] == ["a", "b", "c", "d"]

    def test_without_s2_s5(self, stereo):
        m = dataclasses.replace(stereo, transitions=tuple(t for t in stereo.transitions if t != ("s2", "s5")))
        report = verify_fixture(m)
        assert not report["a"].ok
        assert "empty" in report["a"].detail

    def test_s7_without_edb(self, stereo):
        # the lasso still exists through <s5,q0> -> <s7,q1>, but the trace
        # changes and its word no longer violates the property
        report = verify_fixture(relabel(stereo, "s7", "edb", ThreeValue.F))
        assert not report["a"].ok
        assert "trace" in report["a"].detail

    def test_skeleton_matches_expected(self):
        from pkscheck.fixtures import reference_automaton, stereo_model
        from pkscheck.engine import check

        v = check(stereo_model(), expected()["property"], reference_automaton())
        sk = proof_skeleton(v.proof)
        want = expected()["proof"]
        assert sk["fail"] == want["fail"]
        assert sk["induction"] == want["induction"]
        assert sk["successors"] == want["successors"]
