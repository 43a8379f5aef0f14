"""Shared test configuration.

The acceptance tests record one line per criterion into CRITERIA_RESULTS;
the terminal-summary hook prints them after the run so the pass/fail status
of every criterion is visible even when pytest captures stdout.
"""

from hypothesis import settings

settings.register_profile("exact", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("exact")

CRITERIA_RESULTS = {}


def record_criterion(number: int, line: str) -> None:
    CRITERIA_RESULTS[number] = line


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(CRITERIA_RESULTS):
        terminalreporter.write_line(CRITERIA_RESULTS[number])
