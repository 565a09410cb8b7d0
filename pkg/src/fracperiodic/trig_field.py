"""Real 2*pi-periodic functions stored as truncated trigonometric series.

A :class:`PeriodicFunction` holds ``a0 + sum_{n=1}^N a_n cos(nt) + b_n sin(nt)``.
Grid values are obtained with :func:`synthesize` and projected back with
:func:`analyze`; both go through the real FFT.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainViolation, GridTooCoarse
from .nonlinearity import Nonlinearity

TWO_PI = 2.0 * math.pi
DEFAULT_N_MODES = 64
DEALIAS_REFINEMENT = 3
SUP_REFINEMENT = 8


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


def grid(m: int) -> np.ndarray:
    """Equispaced nodes ``2*pi*j/m`` on ``[0, 2*pi)``."""
    return TWO_PI * np.arange(m) / m


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    a0: float
    a: np.ndarray
    b: np.ndarray
    grid_cache: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        a, b = _frozen(self.a), _frozen(self.b)
        if a.shape != b.shape:
            raise ValueError(f"cosine/sine coefficient lengths differ: {a.size} vs {b.size}")
        if a.size < 1:
            raise ValueError("n_modes must be positive")
        a0 = float(self.a0)
        if not (math.isfinite(a0) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.grid_cache is not None:
            cache = _frozen(self.grid_cache)
            expected = synthesize(self.with_cache(None), cache.size)
            scale = max(1.0, float(np.max(np.abs(expected))))
            if np.max(np.abs(cache - expected)) > 1e-12 * scale:
                raise ValueError("grid_cache is inconsistent with the coefficients")
            object.__setattr__(self, "grid_cache", cache)

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n_modes: int = DEFAULT_N_MODES) -> "PeriodicFunction":
        return cls(0.0, np.zeros(n_modes), np.zeros(n_modes))

    @classmethod
    def constant(cls, value: float, n_modes: int = DEFAULT_N_MODES) -> "PeriodicFunction":
        return cls(value, np.zeros(n_modes), np.zeros(n_modes))

    @classmethod
    def from_modes(cls, mean: float = 0.0, modes=(), n_modes: int = DEFAULT_N_MODES) -> "PeriodicFunction":
        """Build from ``modes = [(n, a_n, b_n), ...]``."""
        a = np.zeros(n_modes)
        b = np.zeros(n_modes)
        for n, an, bn in modes:
            n = int(n)
            if not 1 <= n <= n_modes:
                raise ValueError(f"mode {n} outside 1..{n_modes}")
            a[n - 1] += an
            b[n - 1] += bn
        return cls(mean, a, b)

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "PeriodicFunction":
        """Inverse of :meth:`to_vector` (layout ``[a0, a_1..a_N, b_1..b_N]``)."""
        x = np.asarray(x, dtype=float)
        n = (x.size - 1) // 2
        return cls(x[0], x[1 : n + 1], x[n + 1 :])

    # -- views ----------------------------------------------------------------
    @property
    def n_modes(self) -> int:
        return self.a.size

    @property
    def mean(self) -> float:
        return self.a0

    def to_vector(self) -> np.ndarray:
        return np.concatenate(([self.a0], self.a, self.b))

    def with_cache(self, m: Optional[int]) -> "PeriodicFunction":
        if m is None:
            return PeriodicFunction(self.a0, self.a, self.b)
        return PeriodicFunction(self.a0, self.a, self.b, synthesize(self, m))

    def resized(self, n_modes: int) -> "PeriodicFunction":
        a = np.zeros(n_modes)
        b = np.zeros(n_modes)
        k = min(n_modes, self.n_modes)
        a[:k] = self.a[:k]
        b[:k] = self.b[:k]
        return PeriodicFunction(self.a0, a, b)

    def centered(self) -> "PeriodicFunction":
        return PeriodicFunction(0.0, self.a, self.b)

    def __call__(self, t):
        """Evaluate the series at arbitrary points (direct summation)."""
        t = np.asarray(t, dtype=float)
        n = np.arange(1, self.n_modes + 1)
        phase = t[..., None] * n
        out = self.a0 + np.cos(phase) @ self.a + np.sin(phase) @ self.b
        return out if out.ndim else float(out)

    def increment(self, t, h):
        """``f(t + h) - f(t)`` without cancellation for small ``h``."""
        t = np.asarray(t, dtype=float)
        h = np.asarray(h, dtype=float)
        n = np.arange(1, self.n_modes + 1)
        half = 0.5 * h[..., None] * n
        mid = (t + 0.5 * h)[..., None] * n
        terms = -2.0 * np.sin(half) * (np.sin(mid) * self.a - np.cos(mid) * self.b)
        out = terms.sum(axis=-1)
        return out if out.ndim else float(out)

    def second_difference(self, t, h):
        """``2 f(t) - f(t + h) - f(t - h)`` without cancellation for small ``h``."""
        t = np.asarray(t, dtype=float)
        h = np.asarray(h, dtype=float)
        n = np.arange(1, self.n_modes + 1)
        weight = 4.0 * np.sin(0.5 * h[..., None] * n) ** 2
        phase = t[..., None] * n
        out = (weight * (np.cos(phase) * self.a + np.sin(phase) * self.b)).sum(axis=-1)
        return out if out.ndim else float(out)

    # -- arithmetic -----------------------------------------------------------
    def _coerce(self, other: "PeriodicFunction"):
        n = max(self.n_modes, other.n_modes)
        return self.resized(n), other.resized(n)

    def __add__(self, other):
        if isinstance(other, PeriodicFunction):
            x, y = self._coerce(other)
            return PeriodicFunction(x.a0 + y.a0, x.a + y.a, x.b + y.b)
        return PeriodicFunction(self.a0 + float(other), self.a, self.b)

    __radd__ = __add__

    def __neg__(self):
        return PeriodicFunction(-self.a0, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        scalar = float(scalar)
        return PeriodicFunction(scalar * self.a0, scalar * self.a, scalar * self.b)

    __rmul__ = __mul__

    def max_coefficient_distance(self, other: "PeriodicFunction") -> float:
        x, y = self._coerce(other)
        return float(np.max(np.abs(x.to_vector() - y.to_vector())))

    def coefficient_l2(self) -> float:
        """Euclidean norm of ``(a0, a, b)``; the solvers' convergence measure."""
        return float(np.linalg.norm(self.to_vector()))

    # -- serialization ----------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "a0": self.a0,
            "a": [float(v) for v in self.a],
            "b": [float(v) for v in self.b],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PeriodicFunction":
        n = int(d["n_modes"])
        a, b = list(d["a"]), list(d["b"])
        if len(a) != n or len(b) != n:
            raise ValueError("coefficient arrays do not match n_modes")
        return cls(float(d["a0"]), a, b)

    def to_csv(self, m: Optional[int] = None) -> str:
        """Two-column ``t,value`` dump on ``m`` equispaced nodes."""
        m = m or SUP_REFINEMENT * (2 * self.n_modes + 1)
        t = grid(m)
        values = synthesize(self, m)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "value"])
        for ti, vi in zip(t, values):
            writer.writerow([repr(float(ti)), repr(float(vi))])
        return buf.getvalue()


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-9
    max_refinement_depth: int = 12
    tail_cutoff_periods: int = 2

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_refinement_depth < 1:
            raise ValueError("max_refinement_depth must be >= 1")
        if self.tail_cutoff_periods < 1:
            raise ValueError("tail_cutoff_periods must be >= 1")


@dataclass(frozen=True)
class Norms:
    l2: float
    sup: float
    mean: float
    hs_energy: Optional[float] = None


def synthesize(f: PeriodicFunction, m: int) -> np.ndarray:
    """Samples of ``f`` on the ``m``-point grid ``t_j = 2*pi*j/m``."""
    n = f.n_modes
    if m < 2 * n + 1:
        raise GridTooCoarse(f"grid of {m} points cannot carry {n} modes (need {2 * n + 1})")
    if f.grid_cache is not None and f.grid_cache.size == m:
        return np.array(f.grid_cache)
    spec = np.zeros(m // 2 + 1, dtype=complex)
    spec[0] = f.a0 * m
    spec[1 : n + 1] = 0.5 * m * (f.a - 1j * f.b)
    return np.fft.irfft(spec, n=m)


def analyze(samples, n_modes: int) -> PeriodicFunction:
    """Discrete Fourier projection onto ``n_modes`` modes."""
    samples = np.asarray(samples, dtype=float)
    m = samples.size
    if m < 2 * n_modes + 1:
        raise GridTooCoarse(f"{m} samples cannot resolve {n_modes} modes (need {2 * n_modes + 1})")
    spec = np.fft.rfft(samples) / m
    a0 = spec[0].real
    a = 2.0 * spec[1 : n_modes + 1].real
    b = -2.0 * spec[1 : n_modes + 1].imag
    return PeriodicFunction(a0, a, b)


def derivative(f: PeriodicFunction) -> PeriodicFunction:
    n = np.arange(1, f.n_modes + 1)
    return PeriodicFunction(0.0, n * f.b, -n * f.a)


def compose_nonlinearity(
    phi: Nonlinearity, f: PeriodicFunction, refinement: int = DEALIAS_REFINEMENT
) -> PeriodicFunction:
    """Project ``phi(f(t))`` onto ``f.n_modes`` modes from an oversampled grid."""
    m = refinement * (2 * f.n_modes + 1)
    values = synthesize(f, m)
    if phi.requires_positivity:
        lowest = float(np.min(values))
        if not lowest > 0:
            raise DomainViolation(f"iterate reaches {lowest:.3e} <= 0 inside a singular nonlinearity")
    return analyze(phi(values), f.n_modes)


def hs_energy(f: PeriodicFunction, s: float) -> float:
    """Spectral energy ``pi * sum n^(2s) (a_n^2 + b_n^2)``."""
    n = np.arange(1, f.n_modes + 1, dtype=float)
    return float(math.pi * np.sum(n ** (2.0 * float(s)) * (f.a**2 + f.b**2)))


def l2_norm(f: PeriodicFunction) -> float:
    return math.sqrt(TWO_PI * f.a0**2 + math.pi * float(np.sum(f.a**2 + f.b**2)))


def sup_norm(f: PeriodicFunction) -> float:
    """Max of ``|f|`` on an 8x oversampled grid; a lower bound for the true sup."""
    return float(np.max(np.abs(synthesize(f, SUP_REFINEMENT * (2 * f.n_modes + 1)))))


def grid_min(f: PeriodicFunction, refinement: int = SUP_REFINEMENT) -> float:
    return float(np.min(synthesize(f, refinement * (2 * f.n_modes + 1))))


def grid_max(f: PeriodicFunction, refinement: int = SUP_REFINEMENT) -> float:
    return float(np.max(synthesize(f, refinement * (2 * f.n_modes + 1))))


def norms(f: PeriodicFunction, s: Optional[float] = None) -> Norms:
    return Norms(
        l2=l2_norm(f),
        sup=sup_norm(f),
        mean=f.a0,
        hs_energy=None if s is None else hs_energy(f, s),
    )


def high_mode_fraction(f: PeriodicFunction) -> float:
    """Energy share of the upper half of the spectrum (regularity proxy)."""
    energy = f.a**2 + f.b**2
    total = float(np.sum(energy))
    if total == 0.0:
        return 0.0
    return float(np.sum(energy[f.n_modes // 2 :]) / total)
