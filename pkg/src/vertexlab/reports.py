"""Pass/fail reports shared by the checkers. Failures are data, not exceptions."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Failure:
    indices: tuple
    element: str = ""
    lhs: str = ""
    rhs: str = ""

    def to_dict(self):
        return {"indices": list(self.indices), "element": self.element, "lhs": self.lhs, "rhs": self.rhs}


@dataclass
class Report:
    check: str
    verdict: bool
    first_failure: Failure | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.verdict

    def to_dict(self):
        out = {
            "check": self.check,
            "verdict": self.verdict,
            "first_failure": self.first_failure.to_dict() if self.first_failure else None,
        }
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class AxiomReport:
    """One :class:`Report` per axiom, in the order they were checked."""

    reports: dict[str, Report]

    @property
    def verdict(self):
        return all(r.verdict for r in self.reports.values())

    def __bool__(self):
        return self.verdict

    def __getitem__(self, name):
        return self.reports[name]

    def to_dict(self):
        return {
            "check": "fgl_axioms",
            "verdict": self.verdict,
            "axioms": {k: r.to_dict() for k, r in self.reports.items()},
        }
