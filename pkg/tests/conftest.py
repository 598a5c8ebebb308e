"""Shared test configuration.

Prints one PASS/FAIL line per acceptance criterion after a run that
included tests from test_acceptance.py; sub-tests are grouped by their
``test_c<N>_`` name prefix.
"""

import re

ACCEPTANCE_CRITERIA = {
    "c1": "step-error scaling exponents and lower bounds",
    "c2": "resource-table closed-form regressions",
    "c3": "group-commutator exponential tallies",
    "c4": "analog-block synthesis exactness",
    "c5": "drive-coefficient solver vs direct minimization",
    "c6": "fidelity convergence in step count and drive order",
    "c7": "total-magnetization conservation",
    "c8": "lowered-step parity, drive-step advantage, block ordering",
    "c9": "matched-shot-budget endpoint ordering",
}

_NODE_RE = re.compile(r"test_acceptance\.py::test_(c\d)_")


def _tally(terminalreporter):
    counts = {}
    for category in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(category, []):
            match = _NODE_RE.search(getattr(report, "nodeid", ""))
            if match is None:
                continue
            # setup/teardown reports duplicate the call report for passes
            if getattr(report, "when", "call") != "call" and category == "passed":
                continue
            cid = match.group(1)
            bucket = counts.setdefault(cid, {"passed": 0, "failed": 0, "skipped": 0})
            if category == "skipped":
                bucket["skipped"] += 1
            elif category == "passed":
                bucket["passed"] += 1
            else:
                bucket["failed"] += 1
    return counts


def pytest_terminal_summary(terminalreporter):
    counts = _tally(terminalreporter)
    if not counts:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for cid in sorted(ACCEPTANCE_CRITERIA):
        if cid not in counts:
            continue
        bucket = counts[cid]
        ran = bucket["passed"] + bucket["failed"]
        verdict = "PASS" if bucket["failed"] == 0 and ran > 0 else "FAIL"
        line = (
            f"{cid.upper()} {ACCEPTANCE_CRITERIA[cid]}: {verdict} "
            f"({bucket['passed']}/{ran} checks)"
        )
        if bucket["skipped"]:
            line += f" [{bucket['skipped']} gated check(s) skipped]"
        terminalreporter.write_line(line)
