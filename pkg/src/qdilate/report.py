"""Structured pass/fail reports shared by all verification suites.

A report is a flat list of checks, each carrying a stable id, the identity
being tested (as a human-readable formula string), the measured residual and
its tolerance.  Reports serialize deterministically so repeated runs on the
same input are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class CheckRecord:
    check_id: str
    anchor: str
    residual: float
    tolerance: float
    passed: bool
    skipped: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.check_id,
            "anchor": self.anchor,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "skipped": self.skipped,
            "note": self.note,
        }


@dataclass
class Report:
    suite: str
    environment: dict = field(default_factory=dict)
    records: list[CheckRecord] = field(default_factory=list)

    def check(self, check_id: str, anchor: str, residual: float,
              tolerance: float, note: str = "") -> bool:
        """Record one residual-vs-tolerance check and return whether it passed."""
        ok = bool(residual <= tolerance)
        self.records.append(CheckRecord(check_id, anchor, float(residual),
                                        float(tolerance), ok, note=note))
        return ok

    def require(self, check_id: str, anchor: str, condition: bool,
                note: str = "") -> bool:
        """Record a boolean check (residual 0/1 against tolerance 0.5)."""
        res = 0.0 if condition else 1.0
        self.records.append(CheckRecord(check_id, anchor, res, 0.5,
                                        bool(condition), note=note))
        return bool(condition)

    def skip(self, check_id: str, anchor: str, note: str = "") -> None:
        """Record an expected skip; counts as a pass for the overall status."""
        self.records.append(CheckRecord(check_id, anchor, 0.0, 0.0, True,
                                        skipped=True, note=note))

    def merge(self, other: "Report", prefix: str = "") -> None:
        for rec in other.records:
            cid = f"{prefix}{rec.check_id}" if prefix else rec.check_id
            self.records.append(CheckRecord(cid, rec.anchor, rec.residual,
                                            rec.tolerance, rec.passed,
                                            rec.skipped, rec.note))

    @property
    def overall(self) -> bool:
        return all(r.passed for r in self.records)

    def worst(self) -> float:
        live = [r.residual for r in self.records if not r.skipped]
        return max(live) if live else 0.0

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "environment": self.environment,
            "records": [r.to_dict() for r in self.records],
            "overall": self.overall,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def summary_lines(self) -> list[str]:
        lines = []
        for r in self.records:
            status = "SKIP" if r.skipped else ("PASS" if r.passed else "FAIL")
            lines.append(f"[{status}] {r.check_id}: residual={r.residual:.3e} "
                         f"tol={r.tolerance:.3e}  ({r.anchor})")
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return lines
