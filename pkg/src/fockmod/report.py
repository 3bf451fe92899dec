"""Verification reports: named residual checks with thresholds and pass/fail."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    anchor: str           # the identity or law being verified, as a formula string
    residual: float
    threshold: float
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "residual": self.residual,
            "threshold": self.threshold,
            "passed": self.passed,
            "details": self.details,
        }


@dataclass
class VerificationReport:
    suite: str
    parameters: dict = field(default_factory=dict)
    seed: int | None = None
    checks: list[Check] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)

    def add(self, name, anchor, residual, threshold, **details):
        residual = float(abs(residual))
        check = Check(name, anchor, residual, float(threshold),
                      residual <= threshold, details)
        self.checks.append(check)
        return check

    def add_bool(self, name, anchor, passed, **details):
        # degenerate residual: 0.0 for pass, inf for fail
        check = Check(name, anchor, 0.0 if passed else float("inf"),
                      0.0, bool(passed), details)
        self.checks.append(check)
        return check

    def skip(self, name, reason):
        self.skipped.append({"name": name, "reason": reason})

    def merge(self, other: "VerificationReport"):
        self.checks.extend(other.checks)
        self.skipped.extend(other.skipped)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self):
        return {
            "suite": self.suite,
            "parameters": self.parameters,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "skipped": self.skipped,
        }

    def to_json(self, indent=2):
        return json.dumps(self.as_dict(), indent=indent, default=_jsonable)

    def to_text(self):
        lines = [f"suite: {self.suite}"]
        if self.parameters:
            lines.append("parameters: " + json.dumps(self.parameters, default=_jsonable))
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"[{status}] {c.name}: residual {c.residual:.3e}"
                         f" (tol {c.threshold:.1e})  # {c.anchor}")
        for s in self.skipped:
            lines.append(f"[SKIP] {s['name']}: {s['reason']}")
        lines.append(f"result: {'all passed' if self.passed else 'FAILURES'}"
                     f" ({len(self.checks)} checks, {len(self.skipped)} skipped)")
        return "\n".join(lines)


def _jsonable(obj):
    try:
        return float(obj)
    except (TypeError, ValueError):
        return str(obj)
