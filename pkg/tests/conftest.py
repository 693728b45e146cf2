"""Shared pytest plumbing for the suite.

The acceptance tests report one verdict line per shipped guarantee; those
lines are collected here and replayed in the terminal summary so they stay
visible even with output capture on.
"""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
