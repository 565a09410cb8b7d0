"""Power-sum nonlinearities ``phi(t) = sum_k c_k t**p_k``.

These represent the friction coefficient ``f``, the singular force ``g`` and
the bifurcation nonlinearity ``G``.  Negative or fractional powers make the
function defined on ``(0, inf)`` only; :attr:`Nonlinearity.requires_positivity`
flags that case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Nonlinearity:
    terms: tuple[tuple[float, float], ...] = ()
    requires_positivity: bool = field(init=False)

    def __post_init__(self):
        merged: dict[float, float] = {}
        for coef, power in self.terms:
            coef, power = float(coef), float(power)
            if not (math.isfinite(coef) and math.isfinite(power)):
                raise ValueError(f"non-finite term ({coef}, {power})")
            merged[power] = merged.get(power, 0.0) + coef
        cleaned = tuple((c, p) for p, c in sorted(merged.items()) if c != 0.0)
        object.__setattr__(self, "terms", cleaned)
        positivity = any(p < 0 or p != int(p) for _, p in cleaned)
        object.__setattr__(self, "requires_positivity", positivity)

    @classmethod
    def from_terms(cls, terms: Iterable[Sequence[float]]) -> "Nonlinearity":
        return cls(tuple((float(c), float(p)) for c, p in terms))

    @classmethod
    def zero(cls) -> "Nonlinearity":
        return cls(())

    @classmethod
    def constant(cls, value: float) -> "Nonlinearity":
        return cls(((value, 0.0),))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for c, p in self.terms:
            if p == 0.0:
                out = out + c
            elif p == int(p) and p > 0:
                out = out + c * t ** int(p)
            else:
                out = out + c * np.power(t, p)
        return out if out.ndim else float(out)

    def __add__(self, other: "Nonlinearity") -> "Nonlinearity":
        return Nonlinearity(self.terms + other.terms)

    def __neg__(self) -> "Nonlinearity":
        return self.scaled(-1.0)

    def __sub__(self, other: "Nonlinearity") -> "Nonlinearity":
        return self + (-other)

    def scaled(self, factor: float) -> "Nonlinearity":
        return Nonlinearity(tuple((factor * c, p) for c, p in self.terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def derivative(self) -> "Nonlinearity":
        return Nonlinearity(tuple((c * p, p - 1.0) for c, p in self.terms if p != 0.0))

    def antiderivative_between(self, lo, hi):
        """Exact ``int_lo^hi phi(t) dt`` (``lo, hi > 0`` when singular)."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        total = np.zeros(np.broadcast(lo, hi).shape)
        for c, p in self.terms:
            if p == -1.0:
                total = total + c * (np.log(hi) - np.log(lo))
            else:
                total = total + c * (np.power(hi, p + 1.0) - np.power(lo, p + 1.0)) / (p + 1.0)
        return total if total.ndim else float(total)

    def shifted(self, offset: float) -> "Nonlinearity":
        """``t -> phi(t + offset)``; only non-negative integer powers expand exactly."""
        out: list[tuple[float, float]] = []
        for c, p in self.terms:
            if p < 0 or p != int(p):
                raise ValueError("only polynomial nonlinearities can be shifted")
            k = int(p)
            for j in range(k + 1):
                out.append((c * math.comb(k, j) * offset ** (k - j), float(j)))
        return Nonlinearity(tuple(out))

    def limit_at_zero(self) -> float:
        """Exact one-sided limit at ``0+`` of the power sum."""
        if not self.terms:
            return 0.0
        c, p = self.terms[0]
        if p < 0:
            return math.copysign(math.inf, c)
        return c if p == 0 else 0.0

    def limit_at_infinity(self) -> float:
        if not self.terms:
            return 0.0
        c, p = self.terms[-1]
        if p > 0:
            return math.copysign(math.inf, c)
        return c if p == 0 else 0.0

    def to_list(self) -> list[dict]:
        return [{"coef": c, "power": p} for c, p in self.terms]

    @classmethod
    def from_list(cls, items: Iterable[dict]) -> "Nonlinearity":
        return cls(tuple((float(d["coef"]), float(d["power"])) for d in items))
