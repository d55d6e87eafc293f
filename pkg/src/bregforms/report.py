"""Structured results for identity checks.

Every check in this package reduces to "two independently computed
sides, a gap, a tolerance".  VerificationReport captures that plus the
bookkeeping needed to rerun the check: seed, wall time, and an echo of
the quadrature budget.  The ``anchor`` is a stable slug naming the
identity being exercised (e.g. ``douglas-identity``), so report files
stay greppable when check names change.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

__all__ = ["VerificationReport"]

_TINY = 1e-300


def _as_budget_dict(budget) -> dict:
    if budget is None:
        return {}
    if isinstance(budget, dict):
        return dict(budget)
    if dataclasses.is_dataclass(budget):
        return dataclasses.asdict(budget)
    return {"budget": repr(budget)}


@dataclass
class VerificationReport:
    """One check's outcome: two sides, the gap, and the verdict.

    Attributes
    ----------
    check : str
        Human-readable check name, unique within a suite run.
    anchor : str
        Stable identity slug (the *what* being verified), independent
        of parameter values.
    lhs, rhs : float
        The two sides.  Infinities mark divergent forms.
    abs_err, rel_err : float
        ``|lhs - rhs|`` and the same relative to the larger magnitude.
        NaN when a side is non-finite (the gap is then meaningless and
        ``passed`` carries the verdict alone).
    tolerance : float
        The bound ``rel_err`` was held to, or the composite criterion's
        headline number.
    passed : bool
        The verdict.  Usually ``rel_err <= tolerance``; checks with a
        composite criterion document it in ``extra``.
    seed : int or None
        RNG seed for stochastic checks; None for deterministic ones.
    wall_time_s : float
        Wall time of the check.  Excluded from determinism comparisons.
    budget : dict
        Echo of the quadrature/MC budget the check ran under.
    extra : dict
        Check-specific diagnostics (shrink factors, sample maxima,
        divergence diagnoses, ...).
    """

    check: str
    anchor: str
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    tolerance: float
    passed: bool
    seed: int | None = None
    wall_time_s: float = 0.0
    budget: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_sides(cls, check, anchor, lhs, rhs, tolerance, *, passed=None,
                   seed=None, wall_time_s=0.0, budget=None, extra=None):
        """Build a report from two sides, deriving the gap fields.

        ``passed`` defaults to ``rel_err <= tolerance`` when both sides
        are finite and False otherwise; pass it explicitly for checks
        with a composite criterion.
        """
        lhs = float(lhs)
        rhs = float(rhs)
        if math.isfinite(lhs) and math.isfinite(rhs):
            abs_err = abs(lhs - rhs)
            rel_err = abs_err / max(abs(lhs), abs(rhs), _TINY)
            verdict = rel_err <= tolerance if passed is None else passed
        else:
            abs_err = math.nan
            rel_err = math.nan
            verdict = False if passed is None else passed
        return cls(
            check=check,
            anchor=anchor,
            lhs=lhs,
            rhs=rhs,
            abs_err=abs_err,
            rel_err=rel_err,
            tolerance=float(tolerance),
            passed=bool(verdict),
            seed=seed,
            wall_time_s=float(wall_time_s),
            budget=_as_budget_dict(budget),
            extra=dict(extra or {}),
        )

    def value_fields(self) -> dict:
        """Record without timing, for determinism comparisons."""
        rec = self.to_record()
        rec.pop("wall_time_s")
        return rec

    def to_record(self) -> dict:
        """Plain dict with stable key order."""
        return {
            "check": self.check,
            "anchor": self.anchor,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "seed": self.seed,
            "wall_time_s": self.wall_time_s,
            "budget": self.budget,
            "extra": self.extra,
        }

    def to_json_record(self) -> str:
        """One JSON line; NaN/inf rendered as strings so the line stays
        standard JSON."""

        def scrub(v):
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)
            if isinstance(v, dict):
                return {kk: scrub(vv) for kk, vv in v.items()}
            if isinstance(v, (list, tuple)):
                return [scrub(vv) for vv in v]
            return v

        return json.dumps({k: scrub(v) for k, v in self.to_record().items()})

    def one_line(self) -> str:
        """Compact console line.

        Checks with a positive tolerance show the relative gap; checks
        judged by a composite rule (tolerance 0) and divergent entries
        show the two sides instead, where the gap would mislead.
        """
        status = "PASS" if self.passed else "FAIL"
        if math.isfinite(self.rel_err) and self.tolerance > 0.0:
            gap = f"rel_err={self.rel_err:.3e} tol={self.tolerance:.1e}"
        else:
            gap = f"lhs={self.lhs:.6g} rhs={self.rhs:.6g}"
        return f"[{status}] {self.check}: {gap}"
