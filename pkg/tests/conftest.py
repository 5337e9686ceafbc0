"""Shared pytest plumbing.

The acceptance suite records one line per criterion; echoing them in the
terminal summary keeps the verdicts visible in a plain `pytest -v` run,
where per-test stdout is otherwise captured.
"""

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
