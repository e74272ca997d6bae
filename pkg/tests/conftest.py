"""Shared acceptance reporting: each criterion test records one PASS/FAIL
line, and the collected lines are printed after the run (they survive output
capture, so a plain `pytest -v` shows them)."""

import pytest

_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance():
    def record(num: int, name: str, ok: bool, detail: str = "") -> None:
        verdict = "PASS" if ok else "FAIL"
        suffix = f" — {detail}" if detail else ""
        _LINES[num] = f"criterion {num:2d} {name}: {verdict}{suffix}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_LINES):
        terminalreporter.write_line(_LINES[num])
