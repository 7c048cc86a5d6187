"""
CheckReport: the outcome of one verification check over an instance family.

Every comparison is recorded as lhs <= rhs; a violation is recorded iff
lhs > rhs + tolerance. ">=" checks are recorded with their sides swapped.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

TOL = 1e-9


@dataclass
class Violation:
    instance: str
    params: dict
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {"graph": self.instance, "params": self.params, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack}


@dataclass
class CheckReport:
    check: str
    tested: int = 0
    skipped: int = 0
    comparisons: int = 0
    violations: list[Violation] = field(default_factory=list)
    worst_slack: float | None = None
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def record(self, instance: str, params: dict, lhs: float, rhs: float, tol: float = TOL) -> bool:
        """lhs <= rhs (+ tol). Returns True when the comparison holds."""
        slack = rhs - lhs
        self.comparisons += 1
        if self.worst_slack is None or slack < self.worst_slack:
            self.worst_slack = slack
        if lhs > rhs + tol:
            self.violations.append(Violation(instance, dict(params), float(lhs), float(rhs)))
            return False
        return True

    def record_equal(self, instance: str, params: dict, lhs: float, rhs: float, tol: float = TOL) -> bool:
        """|lhs - rhs| <= tol; the slack is minus the absolute difference."""
        diff = abs(lhs - rhs)
        self.comparisons += 1
        if self.worst_slack is None or -diff < self.worst_slack:
            self.worst_slack = -diff
        if diff > tol:
            self.violations.append(Violation(instance, dict(params), float(lhs), float(rhs)))
            return False
        return True

    def note_extreme(self, key: str, value: float, worst=min) -> None:
        """Keeps the running min (or max) of an observed quantity under notes[key]."""
        current = self.notes.get(key)
        self.notes[key] = value if current is None else worst(current, value)

    def merge(self, other: "CheckReport") -> "CheckReport":
        if other.check != self.check:
            raise ValueError(f"cannot merge report '{other.check}' into '{self.check}'")
        worst = [s for s in (self.worst_slack, other.worst_slack) if s is not None]
        notes = dict(self.notes)
        for key, value in other.notes.items():
            notes.setdefault(key, value)
        return CheckReport(self.check, self.tested + other.tested, self.skipped + other.skipped,
                           self.comparisons + other.comparisons, self.violations + other.violations,
                           min(worst) if worst else None, notes)

    def to_json(self) -> dict:
        slack = self.worst_slack
        return {
            "check": self.check,
            "tested": self.tested,
            "skipped": self.skipped,
            "comparisons": self.comparisons,
            "violations": [v.to_dict() for v in self.violations],
            "worst_slack": None if slack is None or math.isinf(slack) else slack,
            "notes": self.notes,
        }


def merge_reports(reports: Iterable[CheckReport], **meta) -> dict:
    """Suite-level document: per-check reports plus totals."""
    reports = list(reports)
    return {
        **meta,
        "ok": all(r.ok for r in reports),
        "tested": sum(r.tested for r in reports),
        "violations": sum(len(r.violations) for r in reports),
        "checks": [r.to_json() for r in reports],
    }
