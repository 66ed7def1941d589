"""Shared pytest plumbing.

The acceptance tests register one verdict line per criterion here; the
terminal-summary hook prints them after the run, outside of capture, so the
PASS/FAIL verdicts are always visible in the log.
"""

VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS):
            terminalreporter.write_line(line)
