"""Structured results for verification runs.

A report carries a check name, its parameters, a pass/fail/skipped status,
and the list of exact-equality failures, each failure recording where it
happened and the canonical text of both sides.  Wall time is kept in a
separate field so golden comparisons can ignore it.
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field


def _as_text(value) -> str:
    text = getattr(value, "text", None)
    return text() if callable(text) else str(value)


@dataclass
class VerificationReport:
    check: str
    params: dict[str, object] = field(default_factory=dict)
    status: str = "pass"
    failures: list[tuple[str, str, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    wall_ms: float | None = None

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def fail(self, location: str, left: str, right: str) -> None:
        self.failures.append((location, left, right))
        self.status = "fail"

    def check_equal(self, location: str, left, right) -> None:
        """Record a failure unless left == right (exact)."""
        if left != right:
            self.fail(location, _as_text(left), _as_text(right))

    def skip(self, reason: str) -> None:
        if self.status == "pass" and not self.failures:
            self.status = "skipped"
            self.notes.append(reason)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def payload_lines(self) -> list[str]:
        """Deterministic report body; excludes wall time by design."""
        lines = [f"check {self.check}"]
        for key in sorted(self.params):
            lines.append(f"param {key}={self.params[key]}")
        lines.append(f"status {self.status}")
        for text in self.notes:
            lines.append(f"note {text}")
        for loc, left, right in self.failures:
            lines.append(f"failure {loc} | {left} | {right}")
        return lines

    def render(self) -> str:
        lines = self.payload_lines()
        if self.wall_ms is not None:
            lines.append(f"# wall_ms {self.wall_ms:.1f}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "check": self.check,
                "params": {k: str(v) for k, v in sorted(self.params.items())},
                "status": self.status,
                "notes": list(self.notes),
                "failures": [list(f) for f in self.failures],
                "wall_ms": self.wall_ms,
            },
            sort_keys=True,
        )


@contextmanager
def timed(report: VerificationReport):
    start = time.perf_counter()
    try:
        yield report
    finally:
        report.wall_ms = (time.perf_counter() - start) * 1000.0
