"""
Certification results.

A CertificationReport collects one CertificationEntry per check plus the
scalar quantities the command line prints (contraction rate, tau bound,
steady-state robustness bound).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CertificationEntry:
    """
    Outcome of a single certification check.

    Attributes:
        name: Check identifier, e.g. "polygon_convergence"
        certified: True if the sufficient condition holds
        margin: Positive when certified (closed form where available)
        numeric_margin: Same quantity from a dense eigendecomposition
        warnings: Human-readable notes attached during the check
        details: Extra numbers worth reporting
    """

    name: str
    certified: bool
    margin: float
    numeric_margin: float | None = None
    warnings: list[str] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "certified": self.certified,
            "margin": self.margin,
            "numeric_margin": self.numeric_margin,
            "warnings": list(self.warnings),
            "details": dict(self.details),
        }


@dataclass
class CertificationReport:
    """
    Aggregated certification for one scenario.

    Example:
        report = CertificationReport()
        report.add(theorem4_margin(params, InternalDynamics()))
        report.passed
    """

    entries: list[CertificationEntry] = field(default_factory=list)
    contraction_rate: float | None = None
    tau_bound: float | None = None
    steady_state_bound: float | None = None
    notes: list[str] = field(default_factory=list)

    def add(self, entry: CertificationEntry) -> CertificationEntry:
        self.entries.append(entry)
        return entry

    def entry(self, name: str) -> CertificationEntry:
        """Return the entry called ``name``."""
        for item in self.entries:
            if item.name == name:
                return item
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        """True when every entry is certified (and at least one exists)."""
        return bool(self.entries) and all(e.certified for e in self.entries)

    @property
    def warnings(self) -> list[str]:
        return [w for e in self.entries for w in e.warnings] + list(self.notes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "contraction_rate": self.contraction_rate,
            "tau_bound": self.tau_bound,
            "steady_state_bound": self.steady_state_bound,
            "entries": [e.to_dict() for e in self.entries],
            "notes": list(self.notes),
        }
