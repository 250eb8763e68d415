import pytest

# criterion number -> "PASS ..." / "FAIL ..." line, filled by test_acceptance
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])


@pytest.fixture
def threads(monkeypatch):
    """Set URC_THREADS for the duration of a test."""

    def set_threads(value):
        monkeypatch.setenv("URC_THREADS", str(value))

    return set_threads
