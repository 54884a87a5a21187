import random

import pytest

ACCEPTANCE: list = []


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, ok, text)."""

    def record(number: int, ok: bool, text: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}"
        ACCEPTANCE.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
