import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion: acceptance(n, name, passed, detail)."""
    def record(n, name, passed, detail):
        _ACCEPTANCE[n] = f"[{'PASS' if passed else 'FAIL'}] criterion {n}: {name}: {detail}"
        print(_ACCEPTANCE[n])
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
