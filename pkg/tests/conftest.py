import pytest

from sizenet import canonical_table_fixtures

# criterion number -> (description, passed, seconds); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def rsize1():
    return canonical_table_fixtures()[0]


@pytest.fixture(scope="session")
def rsize2():
    return canonical_table_fixtures()[1]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        desc, ok, secs = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {desc} ({secs:.2f}s)")
