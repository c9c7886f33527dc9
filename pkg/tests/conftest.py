"""Shared plumbing: collect acceptance verdict lines for the run summary."""

import pytest

_criterion_lines: dict[int, str] = {}


@pytest.fixture
def record_criterion():
    def _record(result) -> None:
        _criterion_lines[result.number] = result.line()
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _criterion_lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(_criterion_lines):
        terminalreporter.write_line(_criterion_lines[number])
