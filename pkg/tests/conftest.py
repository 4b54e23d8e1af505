import pytest

from carmichael_image.arith import build_tables
from carmichael_image.engine import PrimeSource

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def tables():
    return build_tables(10**6 + 2)


@pytest.fixture(scope="session")
def small_tables():
    return build_tables(10**4 + 2)


@pytest.fixture(scope="session")
def source():
    return PrimeSource.up_to(10**6 + 1)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
