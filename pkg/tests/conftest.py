"""Shared test configuration.

Makes the helper modules in this directory importable and collects the
acceptance-criteria verdicts so the run ends with one PASS/FAIL line per
criterion.
"""

import os
import sys

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
if TESTS_DIR not in sys.path:
    sys.path.insert(0, TESTS_DIR)

# name -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def record_acceptance(name: str, passed: bool, detail: str):
    ACCEPTANCE_RESULTS[name] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name, (passed, detail) in ACCEPTANCE_RESULTS.items():
        verdict = "PASS" if passed else "FAIL"
        line = f"ACCEPTANCE {name}: {verdict}"
        if detail:
            line += f"  [{detail}]"
        tr.write_line(line, green=passed, red=not passed)
