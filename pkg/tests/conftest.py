"""Shared fixtures; collects acceptance-gate result lines and prints them
in the terminal summary so they are visible in normal pytest output."""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_record():
    """Callable: register one human-readable pass/fail line for the summary."""
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
