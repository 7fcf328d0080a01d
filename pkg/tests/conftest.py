import pytest

from solenoidal.constructions import denjoy_construction

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def denjoy():
    return denjoy_construction()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
