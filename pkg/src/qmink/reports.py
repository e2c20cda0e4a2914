"""Structured verification reports with a stable, schema-versioned JSON form.

JSON output is byte-deterministic for a fixed seed: timing is kept out of
the JSON rendering (it still appears in the text rendering) and all
collections are emitted in construction order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: Optional[float] = None
    detail: Optional[str] = None

    def to_json(self) -> dict:
        out = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if self.residual is not None:
            out["residual"] = self.residual
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass
class SuiteReport:
    suite: str
    inputs: dict
    seed: Optional[int]
    checks: list
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "status": "pass" if self.passed else "fail",
            "inputs": self.inputs,
            "seed": self.seed,
            "checks": [c.to_json() for c in self.checks],
        }

    def render_text(self) -> str:
        lines = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'} "
                 f"({self.elapsed_ms:.0f} ms)"]
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            bits = [f"  [{status}] {c.name}"]
            if c.residual is not None:
                bits.append(f"residual={c.residual:.3e}")
            if c.detail is not None:
                bits.append(c.detail)
            lines.append(" ".join(bits))
        return "\n".join(lines)


@dataclass
class ReportBundle:
    reports: list
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "status": "pass" if self.passed else "fail",
            "seed": self.seed,
            "reports": [r.to_json() for r in self.reports],
        }

    def render_json(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)

    def render_text(self) -> str:
        lines = [r.render_text() for r in self.reports]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)
