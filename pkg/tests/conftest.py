from __future__ import annotations

import contextlib

import pytest

_LINES: list = []


class _Criterion:
    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.details: list = []

    def note(self, text: str) -> None:
        self.details.append(text)


@pytest.fixture
def criterion():
    """``with criterion(n, title) as c: ...`` records one pass/fail line for the acceptance summary."""

    @contextlib.contextmanager
    def open_criterion(number: int, title: str):
        c = _Criterion(number, title)
        ok = False
        try:
            yield c
            ok = True
        finally:
            detail = "; ".join(c.details)
            line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
            _LINES.append((number, line))
            print(line)

    return open_criterion


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)
