"""Shared fixtures and the acceptance summary printed at the end of a run."""
import pytest

# filled by tests/test_acceptance.py: one line per criterion
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    from fracrenewal.montecarlo import RngStream

    return RngStream(7, 0)
