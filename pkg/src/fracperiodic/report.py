"""Solver report record shared by every solve path."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union

from .trig_field import PeriodicFunction

Solution = Union[PeriodicFunction, list]


@dataclass
class SolveReport:
    problem_echo: dict
    converged: bool
    iterations: int
    residual_history: list
    solution: Solution
    residual: float
    checks: dict = field(default_factory=dict)
    mean_level: Any = 0.0
    bounds: Optional[dict] = None
    notes: list = field(default_factory=list)

    @property
    def full_solution(self) -> Solution:
        """Mean level re-attached to the mean-zero part."""
        if isinstance(self.solution, list):
            return [v + float(c) for v, c in zip(self.solution, self.mean_level)]
        return self.solution + float(self.mean_level)

    def to_dict(self) -> dict:
        if isinstance(self.solution, list):
            solution = [v.to_dict() for v in self.solution]
        else:
            solution = self.solution.to_dict()
        out = {
            "problem_echo": self.problem_echo,
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "residual_history": [float(r) for r in self.residual_history],
            "residual": float(self.residual),
            "mean_level": self.mean_level,
            "solution": solution,
            "checks": self.checks,
        }
        if self.bounds is not None:
            out["bounds"] = self.bounds
        if self.notes:
            out["notes"] = list(self.notes)
        return out
