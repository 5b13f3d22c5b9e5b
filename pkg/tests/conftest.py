import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None:
        return
    names = {int(r.nodeid.split("criterion_")[1].split("_")[0]): r.outcome
             for key in ("passed", "failed") for r in terminalreporter.stats.get(key, [])
             if "test_acceptance.py::test_criterion_" in r.nodeid and r.when == "call"}
    if not names:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(names):
        ok, detail = mod.RESULTS.get(n, (False, "did not complete"))
        ok = ok and names[n] == "passed"
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
