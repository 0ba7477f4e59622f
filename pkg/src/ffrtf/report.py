"""Check records and their deterministic text and JSON renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

SCHEMA = "ffrtf-report/1"
ROWS_SCHEMA = "ffrtf-rows/1"


def exact_text(value: object) -> str:
    """Canonical string of a value; rationals always as "p/q"."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


@dataclass(frozen=True)
class Check:
    suite: str
    check_id: str
    inputs: str
    left: str
    right: str

    @property
    def passed(self) -> bool:
        return self.left == self.right

    def as_dict(self) -> dict[str, str]:
        return {"suite": self.suite, "id": self.check_id, "inputs": self.inputs, "left": self.left,
                "right": self.right, "verdict": "pass" if self.passed else "fail"}


@dataclass
class Report:
    config: dict[str, str] = field(default_factory=dict)
    suites: list[str] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def ok(self) -> bool:
        return self.passed == len(self.checks)

    def summary(self) -> dict[str, object]:
        return {"total": len(self.checks), "passed": self.passed, "failed": len(self.checks) - self.passed,
                "ok": self.ok}

    def to_json(self) -> str:
        doc = {"schema": SCHEMA, "config": self.config, "suites": self.suites,
               "checks": [c.as_dict() for c in self.checks], "summary": self.summary()}
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            if c.passed:
                lines.append(f"PASS {c.suite} {c.check_id}")
            else:
                lines.append(f"FAIL {c.suite} {c.check_id} [{c.inputs}]")
                lines.append(f"  left:  {c.left}")
                lines.append(f"  right: {c.right}")
        for name in self.suites:
            mine = [c for c in self.checks if c.suite == name]
            good = sum(1 for c in mine if c.passed)
            lines.append(f"suite {name}: {good}/{len(mine)} passed")
        s = self.summary()
        lines.append(f"total: {s['passed']}/{s['total']} passed; {'OK' if self.ok else 'FAILED'}")
        return "\n".join(lines) + "\n"


def rows_json(kind: str, config: dict[str, str], rows: list[dict[str, str]]) -> str:
    doc = {"schema": ROWS_SCHEMA, "kind": kind, "config": config, "rows": rows}
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
