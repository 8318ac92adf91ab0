from __future__ import annotations

import pytest

CRITERIA = {
    1: "scenario reproduction",
    2: "reasoner oracle equivalence",
    3: "coherence suite",
    4: "aggregation correctness",
    5: "ledger accountability",
    6: "TET benchmark",
    7: "round-trip formats",
}
_results: dict = {}


@pytest.fixture
def acceptance():
    """Record the verdict for one acceptance criterion."""
    def record(number: int, ok: bool, detail: str) -> bool:
        _results[number] = (ok, detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    ran = any("test_acceptance.py" in getattr(report, "nodeid", "")
              for reports in terminalreporter.stats.values() for report in reports)
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for number, name in CRITERIA.items():
        if number not in _results:
            terminalreporter.write_line(f"NOT RUN [{number}] {name}")
            continue
        ok, detail = _results[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{number}] {name}: {detail}")
