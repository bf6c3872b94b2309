from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

_acceptance_lines = []


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def criterion(request):
    """Record one pass/fail summary line per acceptance criterion.

    Usage: ``criterion(number, title, passed, detail)``; the line is printed in
    the terminal summary and the assertion is made here so a red criterion
    also fails the test.
    """
    def record(number, title, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        _acceptance_lines.append((number, f"[criterion {number}] {status}  {title}  {detail}".rstrip()))
        assert passed, f"criterion {number} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_acceptance_lines):
        terminalreporter.write_line(line)
