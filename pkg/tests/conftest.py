import sys
from pathlib import Path

import pytest

# lets test modules import the shared circuit factory
sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(key, passed, detail=""):
        ACCEPTANCE[key] = (bool(passed), detail)
        print(f"{key}: {'PASS' if passed else 'FAIL'}  {detail}")
        return bool(passed)

    return record


def _order(key):
    head, _, tail = key.partition("-")
    return int(head[2:]), tail


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=_order):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key:<14} {'PASS' if passed else 'FAIL'}  {detail}")
