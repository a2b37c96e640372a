import pytest

from mmblock import BlockerPopulation, Scenario


@pytest.fixture
def baseline():
    return Scenario()


@pytest.fixture
def population():
    return BlockerPopulation()


def pytest_terminal_summary(terminalreporter):
    from tests.test_acceptance import RESULTS, line
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(line(n, *RESULTS[n]))
