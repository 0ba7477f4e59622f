from __future__ import annotations

CRITERIA = {
    "test_AC1": "AC1 local test-function lemmas",
    "test_AC2": "AC2 local spherical characters",
    "test_AC3": "AC3 eta machinery",
    "test_AC4": "AC4 orbital identity for regular orbits",
    "test_AC5": "AC5 regularized orbits",
    "test_AC6": "AC6 M-side equals summed N-side",
    "test_AC7": "AC7 derivative functional routes",
    "test_AC8": "AC8 Picard engine against point counts",
}


def pytest_terminal_summary(terminalreporter):
    verdicts: dict[str, tuple[str, str]] = {}
    for outcome in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            key = name[:8]
            if key not in CRITERIA or (rep.when != "call" and outcome == "passed"):
                continue
            detail = dict(getattr(rep, "user_properties", ())).get("checks", "")
            verdicts[key] = ("PASS" if outcome == "passed" else "FAIL", detail)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for key, label in CRITERIA.items():
        if key in verdicts:
            verdict, detail = verdicts[key]
            terminalreporter.write_line(f"{verdict} {label}" + (f" ({detail})" if detail else ""))
