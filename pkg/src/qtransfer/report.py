from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any


@dataclass
class ResidualReport:
    """Outcome of one identity check.

    ``passed`` is ``relative_residual <= tolerance``.  ``elapsed`` is kept out
    of serialized reports so that they stay byte-reproducible.
    """

    name: str
    parameters: dict[str, Any]
    absolute_residual: float
    relative_residual: float
    tolerance: float
    elapsed: float = 0.0
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.relative_residual <= self.tolerance

    def to_json(self, timings: bool = False) -> dict[str, Any]:
        out = {
            "name": self.name,
            "parameters": self.parameters,
            "absolute_residual": self.absolute_residual,
            "relative_residual": self.relative_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.details:
            out["details"] = self.details
        if timings:
            out["elapsed"] = self.elapsed
        return out

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<28} rel={self.relative_residual:.3e}  tol={self.tolerance:.1e}"


@contextmanager
def stopwatch():
    """Yields a one-element list that receives the elapsed seconds on exit."""
    box = [0.0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = time.perf_counter() - start


def merge(name: str, parameters: dict, reports: list[ResidualReport], tolerance: float) -> ResidualReport:
    """Aggregate sub-reports into a worst-case report."""
    worst_abs = max((r.absolute_residual for r in reports), default=0.0)
    worst_rel = max((r.relative_residual for r in reports), default=0.0)
    failing = [r.parameters for r in reports if not r.passed]
    return ResidualReport(
        name,
        parameters,
        worst_abs,
        worst_rel,
        tolerance,
        elapsed=sum(r.elapsed for r in reports),
        details={"cases": len(reports), "failing": failing[:20]},
    )
