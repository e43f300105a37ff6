from __future__ import annotations

import pytest

from splitmps import load_fixture

ACCEPTANCE_LINES: dict[int, str] = {}


def report(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter) -> None:
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def nice():
    return load_fixture("nice-simps")


@pytest.fixture(scope="session")
def mbqc():
    return load_fixture("mbqc-simps")
