import pytest

from divnet.graph import NetworkSpec
from divnet.sieve import get_tables


@pytest.fixture(scope="session")
def tables_4096():
    return get_tables(4096)


@pytest.fixture
def spec():
    def make(n, removed=()):
        return NetworkSpec(n, frozenset(removed))

    return make


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
