import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mkwaring.checks import master_invariant  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture()
def report_criterion():
    """Record one acceptance line; printed immediately and in the terminal summary."""

    def record(number, name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


@pytest.fixture(scope="session", autouse=True)
def every_oracle_pair_divides_m():
    """After the whole run: m(k, R) | m(k) for every pair any test computed."""
    yield
    result = master_invariant()
    ACCEPTANCE_LINES.append(f"{result.line()} [whole session]")
    assert result.ok, result.detail


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
