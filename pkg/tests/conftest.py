import pytest

from pkscheck.fixtures import reference_automaton, stereo_model

PSI3 = "G(edb -> F(cert | fl))"


@pytest.fixture(scope="session")
def stereo():
    return stereo_model()


@pytest.fixture(scope="session")
def a_ref():
    return reference_automaton()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
