"""Structured pass/fail reports with a stable JSON form."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    """Outcome of one verification check.

    The invariant ``passed == (worst_residual <= tolerance)`` is enforced at
    construction; build reports through ``from_residual`` so it cannot drift.
    """

    check: str
    passed: bool
    worst_residual: float
    tolerance: float
    witness: dict | None = None
    details: list = field(default_factory=list)

    @classmethod
    def from_residual(cls, check: str, worst_residual: float, tolerance: float,
                      witness: dict | None = None,
                      details: list | None = None) -> "Report":
        return cls(
            check=check,
            passed=bool(worst_residual <= tolerance),
            worst_residual=float(worst_residual),
            tolerance=float(tolerance),
            witness=witness,
            details=list(details) if details else [],
        )

    def to_json_dict(self) -> dict:
        out = {
            "check": self.check,
            "pass": self.passed,
            "worstResidual": self.worst_residual,
            "tolerance": self.tolerance,
            "details": self.details,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    @classmethod
    def from_json_dict(cls, d: dict) -> "Report":
        return cls(
            check=d["check"],
            passed=bool(d["pass"]),
            worst_residual=float(d["worstResidual"]),
            tolerance=float(d["tolerance"]),
            witness=d.get("witness"),
            details=list(d.get("details", [])),
        )
