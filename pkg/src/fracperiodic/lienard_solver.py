"""Periodic solutions of fractional Liénard equations and their vector form.

Scalar problem, in the orientation of the plus-Laplacian ``(Delta)^s = -A_s``::

    -A_s u + f(C + u) u' = w,       mean(w) = 0,

solved for the mean-zero part ``u``; the full solution is ``C + u``.  The
fixed-point map is ``T(z) = (A_s + I)^{-1} [z - w + f(C + z) z']`` (the
invertible form of the resolvent), iterated with damping ``theta``.  A Newton
corrector with the collocation Jacobian is available and is used by the
``hybrid`` method once Picard has made the residual small or stalls.

The vector problem replaces ``f`` by the Hessian ``F`` of a polynomial
potential and adds a coupling matrix::

    -A_{s_i} v_i + (F(ubar + v) v')_i + (A v)_i = w_i,    A ubar = mean(e).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .discretization import Collocation, damped_newton
from .errors import ConditionViolation, DomainViolation, NonConvergence, SolvabilityViolation
from .frac_op import FracOrder, apply_spectral
from .linear_solver import MEAN_TOL, solve_linear
from .nonlinearity import Nonlinearity
from .report import SolveReport
from .trig_field import (
    SUP_REFINEMENT,
    TWO_PI,
    PeriodicFunction,
    analyze,
    derivative,
    high_mode_fraction,
    synthesize,
)

log = logging.getLogger(__name__)

METHODS = ("picard", "newton", "hybrid")


@dataclass(frozen=True)
class IterationConfig:
    damping: float = 0.5
    residual_tol: float = 1e-10
    max_iterations: int = 500
    continuation_lambda: float = 1.0
    method: str = "hybrid"

    def __post_init__(self):
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not 0.0 < self.continuation_lambda <= 1.0:
            raise ValueError("continuation_lambda must lie in (0, 1]")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")


@dataclass(frozen=True)
class LienardProblem:
    f: Nonlinearity
    w: PeriodicFunction
    s: FracOrder
    mean_level: float = 0.0

    def __post_init__(self):
        s = self.s if isinstance(self.s, FracOrder) else FracOrder(self.s)
        object.__setattr__(self, "s", s.require_standing())

    def echo(self) -> dict:
        return {
            "kind": "lienard",
            "f": self.f.to_list(),
            "w": self.w.to_dict(),
            "s": self.s.s,
            "mean_level": self.mean_level,
        }


def check_solvability(w: PeriodicFunction) -> float:
    """Mean of the forcing; a periodic solution needs it to vanish."""
    return float(w.mean)


# -- scalar equation --------------------------------------------------------------


def _drift_values(f: Nonlinearity, level: float, u_vals: np.ndarray, du_vals: np.ndarray) -> np.ndarray:
    shifted = level + u_vals
    if f.requires_positivity and not np.min(shifted) > 0:
        raise DomainViolation(f"C + u reaches {np.min(shifted):.3e} inside a singular friction term")
    return f(shifted) * du_vals


def lienard_residual(u: PeriodicFunction, p: LienardProblem, lam: float = 1.0) -> PeriodicFunction:
    """``-A_s u + lam f(C+u) u' - lam w`` evaluated through the series API.

    Products are formed on an ``8 x`` grid through the FFT, independently of
    the collocation matrices the iteration uses.
    """
    m = SUP_REFINEMENT * (2 * u.n_modes + 1)
    drift = _drift_values(p.f, p.mean_level, synthesize(u, m), synthesize(derivative(u), m))
    return -apply_spectral(u, p.s) + lam * analyze(drift, u.n_modes) - lam * p.w.resized(u.n_modes)


def drift_neutrality(u: PeriodicFunction, f: Nonlinearity, level: float) -> float:
    """``|int_0^{2pi} f(C+u) u' u dt|``, exact for polynomial ``f`` (equispaced rule)."""
    m = SUP_REFINEMENT * (2 * u.n_modes + 1)
    vals = synthesize(u, m)
    drift = _drift_values(f, level, vals, synthesize(derivative(u), m))
    return abs(TWO_PI * float(np.mean(drift * vals)))


class _ScalarOps:
    """Collocation form of the scalar residual and its Jacobian."""

    def __init__(self, p: LienardProblem, lam: float):
        self.p = p
        self.lam = lam
        n = p.w.n_modes
        self.col = Collocation(n)
        self.Lam = self.col.lam(p.s)
        self.df = p.f.derivative()
        self.w = p.w.to_vector()

    def residual(self, x: np.ndarray) -> np.ndarray:
        col = self.col
        drift = _drift_values(self.p.f, self.p.mean_level, col.S @ x, col.Sd @ x)
        return -self.Lam * x + self.lam * (col.P @ drift) - self.lam * self.w

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        col = self.col
        vals = self.p.mean_level + col.S @ x
        dvals = col.Sd @ x
        J = col.P @ (((self.df(vals) * dvals)[:, None] * col.S) + (self.p.f(vals)[:, None] * col.Sd))
        return -np.diag(self.Lam) + self.lam * J

    def picard(self, x: np.ndarray) -> np.ndarray:
        col = self.col
        drift = col.P @ _drift_values(self.p.f, self.p.mean_level, col.S @ x, col.Sd @ x)
        rhs = x - self.lam * self.w + self.lam * drift
        out = solve_linear(PeriodicFunction.from_vector(rhs), self.p.s, gamma=1.0).to_vector()
        out[0] = 0.0
        return out


def _iterate(residual, jacobian, picard, x0, keep: np.ndarray, cfg: IterationConfig):
    """Shared driver for the scalar and vector problems.

    ``keep`` indexes the unknowns actually solved for; the mean entries are
    pinned to zero and their residual rows dropped.
    """
    x = np.array(x0, dtype=float)
    history = [float(np.linalg.norm(residual(x)[keep]))]
    iterations = 0
    theta = cfg.damping

    if cfg.method in ("picard", "hybrid"):
        switch = math.sqrt(cfg.residual_tol) if cfg.method == "hybrid" else 0.0
        best = history[0]
        while history[-1] > cfg.residual_tol and iterations < cfg.max_iterations:
            if cfg.method == "hybrid" and history[-1] <= switch:
                break
            x = (1.0 - theta) * x + theta * picard(x)
            iterations += 1
            history.append(float(np.linalg.norm(residual(x)[keep])))
            if cfg.method == "hybrid" and history[-1] > 10.0 * best:
                log.debug("picard diverging after %d steps, handing over to newton", iterations)
                break
            best = min(best, history[-1])
        if cfg.method == "picard":
            return x, history, iterations, history[-1] <= cfg.residual_tol

    def r_free(y):
        z = x.copy()
        z[keep] = y
        return residual(z)[keep]

    def j_free(y):
        z = x.copy()
        z[keep] = y
        return jacobian(z)[np.ix_(keep, keep)]

    remaining = max(1, cfg.max_iterations - iterations)
    result = damped_newton(r_free, j_free, x[keep], cfg.residual_tol, remaining, raise_on_failure=False)
    x = x.copy()
    x[keep] = result.x
    history.extend(result.residual_history[1:])
    return x, history, iterations + result.iterations, result.converged


def solve_lienard(p: LienardProblem, cfg: IterationConfig = IterationConfig()) -> SolveReport:
    """Periodic solution of ``-A_s u + lam f(C+u) u' = lam w`` with ``lam = cfg.continuation_lambda``."""
    wbar = check_solvability(p.w)
    if abs(wbar) > MEAN_TOL:
        raise SolvabilityViolation(f"forcing mean {wbar:.3e} is not zero; no periodic solution exists")
    lam = cfg.continuation_lambda
    ops = _ScalarOps(p, lam)
    n = p.w.n_modes

    keep = np.arange(1, 2 * n + 1)
    x, history, iterations, converged = _iterate(
        ops.residual, ops.jacobian, ops.picard, np.zeros(2 * n + 1), keep, cfg
    )
    if not converged:
        raise NonConvergence(
            f"Liénard iteration stopped at residual {history[-1]:.3e} after {iterations} steps",
            last_residual=history[-1],
        )
    x[0] = 0.0
    u = PeriodicFunction.from_vector(x)
    check = lienard_residual(u, p, lam)
    checks = {
        "verified_residual": check.coefficient_l2(),
        "mean_identity": abs(check.a0),
        "drift_neutrality": drift_neutrality(u, p.f, p.mean_level),
        "high_mode_fraction": high_mode_fraction(u),
    }
    echo = p.echo()
    echo["continuation_lambda"] = lam
    return SolveReport(
        problem_echo=echo,
        converged=True,
        iterations=iterations,
        residual_history=history,
        solution=u,
        residual=checks["verified_residual"],
        checks=checks,
        mean_level=float(p.mean_level),
    )


# -- vector systems ----------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """``H(u) = sum_k c_k prod_i u_i^{e_ki}`` in ``n`` variables."""

    n: int
    terms: tuple = ()

    def __post_init__(self):
        merged: dict = {}
        for coef, exps in self.terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.n or any(e < 0 for e in exps):
                raise ValueError(f"exponent tuple {exps} does not fit {self.n} variables")
            merged[exps] = merged.get(exps, 0.0) + float(coef)
        cleaned = tuple((c, e) for e, c in sorted(merged.items()) if c != 0.0)
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n, ())

    def partial(self, index: Sequence[int]) -> "Polynomial":
        """Mixed partial derivative along the variable list ``index``."""
        terms = list(self.terms)
        for i in index:
            nxt = []
            for c, e in terms:
                if e[i] == 0:
                    continue
                e2 = list(e)
                e2[i] -= 1
                nxt.append((c * e[i], tuple(e2)))
            terms = nxt
        return Polynomial(self.n, tuple(terms))

    def __call__(self, u: np.ndarray) -> np.ndarray:
        """Evaluate at points ``u`` of shape ``(n, ...)``."""
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape[1:])
        for c, e in self.terms:
            term = np.full(u.shape[1:], c)
            for i, k in enumerate(e):
                if k:
                    term = term * u[i] ** k
            out = out + term
        return out

    def hessian(self, u: np.ndarray) -> np.ndarray:
        return np.array([[self.partial((i, j))(u) for j in range(self.n)] for i in range(self.n)])

    def third(self, u: np.ndarray) -> np.ndarray:
        return np.array(
            [[[self.partial((i, j, k))(u) for k in range(self.n)] for j in range(self.n)] for i in range(self.n)]
        )

    def to_list(self) -> list:
        return [{"coef": c, "exponents": list(e)} for c, e in self.terms]

    @classmethod
    def from_list(cls, n: int, items) -> "Polynomial":
        return cls(n, tuple((float(d["coef"]), tuple(d["exponents"])) for d in items))


@dataclass(frozen=True)
class SystemProblem:
    s_vec: tuple
    potential_H: Polynomial
    A: np.ndarray
    e: tuple

    def __post_init__(self):
        s_vec = tuple((s if isinstance(s, FracOrder) else FracOrder(s)).require_standing() for s in self.s_vec)
        object.__setattr__(self, "s_vec", s_vec)
        A = np.array(self.A, dtype=float)
        n = len(s_vec)
        if A.shape != (n, n) or len(self.e) != n or self.potential_H.n != n:
            raise ValueError("dimension mismatch between s_vec, A, e and potential_H")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        n_modes = max(f.n_modes for f in self.e)
        object.__setattr__(self, "e", tuple(f.resized(n_modes) for f in self.e))

    @property
    def n(self) -> int:
        return len(self.s_vec)

    @property
    def M(self) -> float:
        """Largest eigenvalue of the symmetric part of ``A``."""
        return float(np.max(np.linalg.eigvalsh(0.5 * (self.A + self.A.T))))

    def echo(self) -> dict:
        return {
            "kind": "system",
            "s_vec": [s.s for s in self.s_vec],
            "potential_H": self.potential_H.to_list(),
            "A": [[float(v) for v in row] for row in self.A],
            "e": [f.to_dict() for f in self.e],
        }


def mean_state(p: SystemProblem) -> np.ndarray:
    """Minimum-norm ``ubar`` with ``A ubar = ebar``; rejects data the theory excludes."""
    if p.M >= 1.0:
        raise ConditionViolation(f"symmetric part of A has top eigenvalue M={p.M:.6g} >= 1")
    ebar = np.array([f.mean for f in p.e])
    ubar, *_ = np.linalg.lstsq(p.A, ebar, rcond=None)
    if np.linalg.norm(p.A @ ubar - ebar) > 1e-10:
        raise ConditionViolation("mean forcing is not in the range of A")
    return ubar


def system_residual(vs: Sequence[PeriodicFunction], ubar: np.ndarray, p: SystemProblem) -> list:
    """Component residuals through the series API on an ``8 x`` grid."""
    n_modes = vs[0].n_modes
    m = SUP_REFINEMENT * (2 * n_modes + 1)
    vals = np.array([ubar[i] + synthesize(v, m) for i, v in enumerate(vs)])
    dvals = np.array([synthesize(derivative(v), m) for v in vs])
    F = p.potential_H.hessian(vals)
    drift = np.einsum("ijm,jm->im", F, dvals)
    out = []
    for i, v in enumerate(vs):
        coupling = sum((p.A[i, j] * vs[j] for j in range(p.n)), PeriodicFunction.zero(n_modes))
        w_i = p.e[i].resized(n_modes) - p.e[i].mean
        out.append(-apply_spectral(v, p.s_vec[i]) + analyze(drift[i], n_modes) + coupling - w_i)
    return out


class _SystemOps:
    def __init__(self, p: SystemProblem, ubar: np.ndarray):
        self.p = p
        self.ubar = ubar
        self.n_modes = p.e[0].n_modes
        self.k = 2 * self.n_modes + 1
        self.col = Collocation(self.n_modes)
        self.Lams = [self.col.lam(s) for s in p.s_vec]
        self.w = [f.to_vector() - np.eye(1, self.k, 0)[0] * f.mean for f in p.e]

    def _split(self, x):
        return x.reshape(self.p.n, self.k)

    def _fields(self, X):
        col = self.col
        vals = self.ubar[:, None] + X @ col.S.T
        dvals = X @ col.Sd.T
        return vals, dvals

    def residual(self, x):
        X = self._split(x)
        vals, dvals = self._fields(X)
        F = self.p.potential_H.hessian(vals)
        drift = np.einsum("ijm,jm->im", F, dvals) @ self.col.P.T
        R = -np.array(self.Lams) * X + drift + self.p.A @ X - np.array(self.w)
        return R.ravel()

    def jacobian(self, x):
        X = self._split(x)
        col = self.col
        vals, dvals = self._fields(X)
        F = self.p.potential_H.hessian(vals)
        T = self.p.potential_H.third(vals)
        n, k = self.p.n, self.k
        J = np.zeros((n * k, n * k))
        for i in range(n):
            for j in range(n):
                block = col.P @ (F[i, j][:, None] * col.Sd)
                # d/dv_j of F_il(u) v_l' gives sum_l T_ilj v_l'
                weight = np.einsum("lm,lm->m", T[i, :, j], dvals)
                block = block + col.P @ (weight[:, None] * col.S)
                block = block + self.p.A[i, j] * np.eye(k)
                if i == j:
                    block = block - np.diag(self.Lams[i])
                J[i * k : (i + 1) * k, j * k : (j + 1) * k] = block
        return J

    def picard(self, x):
        X = self._split(x)
        vals, dvals = self._fields(X)
        F = self.p.potential_H.hessian(vals)
        drift = np.einsum("ijm,jm->im", F, dvals) @ self.col.P.T
        rhs = X - np.array(self.w) + drift + self.p.A @ X
        out = []
        for i in range(self.p.n):
            sol = solve_linear(PeriodicFunction.from_vector(rhs[i]), self.p.s_vec[i], gamma=1.0).to_vector()
            sol[0] = 0.0
            out.append(sol)
        return np.concatenate(out)


def solve_system(p: SystemProblem, cfg: IterationConfig = IterationConfig()) -> SolveReport:
    ubar = mean_state(p)
    ops = _SystemOps(p, ubar)
    n, k = p.n, ops.k

    keep = np.array([i * k + j for i in range(n) for j in range(1, k)])
    x, history, iterations, converged = _iterate(ops.residual, ops.jacobian, ops.picard, np.zeros(n * k), keep, cfg)
    if not converged:
        raise NonConvergence(
            f"system iteration stopped at residual {history[-1]:.3e} after {iterations} steps",
            last_residual=history[-1],
        )
    X = x.reshape(n, k).copy()
    X[:, 0] = 0.0
    vs = [PeriodicFunction.from_vector(row) for row in X]
    checks_res = system_residual(vs, ubar, p)
    component = [r.coefficient_l2() for r in checks_res]
    checks = {
        "verified_residual": max(component),
        "component_residuals": component,
        "mean_identity": max(abs(r.a0) for r in checks_res),
        "M": p.M,
        "high_mode_fraction": max(high_mode_fraction(v) for v in vs),
    }
    return SolveReport(
        problem_echo=p.echo(),
        converged=True,
        iterations=iterations,
        residual_history=history,
        solution=vs,
        residual=checks["verified_residual"],
        checks=checks,
        mean_level=[float(c) for c in ubar],
    )
