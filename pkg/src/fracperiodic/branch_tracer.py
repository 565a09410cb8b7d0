"""Pseudo-arclength continuation in ``mu`` for

    -A_s u + c u' + mu u = G(u) + e,        G >= 0 singular at 0+, mean(e) > 0.

Averaging over a period gives ``mu * mean(u) = mean(G(u)) + mean(e) > 0``, so
positive solutions need ``mu > 0`` and ``mean(u) ~ mean(e)/mu`` as the branch
runs off to infinity at ``mu -> 0+``.  The tracer records this identity at
every point and reports whatever fold structure it actually meets.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .discretization import Collocation, damped_newton
from .errors import DomainViolation, NonConvergence, SeedFailure, StallAtFold
from .frac_op import FracOrder, apply_spectral
from .lienard_solver import IterationConfig
from .nonlinearity import Nonlinearity
from .singular_solver import ContinuationConfig, RepulsiveProblem, TOWARD_INF, TOWARD_ZERO, solve_repulsive
from .trig_field import (
    SUP_REFINEMENT,
    PeriodicFunction,
    analyze,
    derivative,
    grid_max,
    grid_min,
    l2_norm,
    sup_norm,
    synthesize,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BifurcationProblem:
    c: float
    G: Nonlinearity
    e: PeriodicFunction
    s: FracOrder
    mu_range: tuple = (1e-3, 10.0)

    def __post_init__(self):
        s = self.s if isinstance(self.s, FracOrder) else FracOrder(self.s)
        object.__setattr__(self, "s", s.require_standing())
        object.__setattr__(self, "mu_range", (float(self.mu_range[0]), float(self.mu_range[1])))

    @property
    def ebar(self) -> float:
        return float(self.e.mean)

    def conditions(self) -> dict:
        G = self.G
        t_all = np.concatenate([TOWARD_ZERO, TOWARD_INF])
        tau = TOWARD_ZERO[TOWARD_ZERO <= 1e-2]
        partial = G.antiderivative_between(tau, 1.0) if not G.is_zero else np.zeros_like(tau)
        tag = "checked numerically"
        return {
            "H1": {"holds": G.limit_at_zero() == math.inf, "evidence": tag},
            "H2": {"holds": G.limit_at_infinity() == 0.0 and abs(float(G(TOWARD_INF[-1]))) < 1e-3, "evidence": tag},
            "H3": {"holds": self.ebar > 0, "evidence": "exact"},
            "H4": {
                "holds": bool(np.all(np.diff(partial) < 0)) and any(c > 0 and p <= -1 for c, p in G.terms),
                "evidence": tag,
            },
            "G_nonnegative": {"holds": bool(np.all(G(t_all) >= 0)), "evidence": tag},
            "c_positive": {"holds": self.c > 0, "evidence": "exact"},
        }

    def validate(self) -> dict:
        cond = self.conditions()
        failed = [k for k, v in cond.items() if not v["holds"]]
        if failed:
            raise SeedFailure(f"bifurcation data violate {', '.join(failed)}; no seed can be built")
        lo, hi = self.mu_range
        if not lo < hi:
            raise SeedFailure(f"empty mu range {self.mu_range}")
        return cond

    def echo(self) -> dict:
        return {
            "kind": "bifurcation",
            "c": self.c,
            "G": self.G.to_list(),
            "e": self.e.to_dict(),
            "s": self.s.s,
            "mu_range": list(self.mu_range),
        }


@dataclass(frozen=True)
class BranchConfig:
    mu_seed: float = 1.0
    initial_step: float = 0.05
    min_step: float = 1e-7
    max_step_relative: float = 0.25
    max_points: int = 400
    sup_norm_cap: float = 1e3
    arclength_budget: float = 1e5
    residual_tol: float = 1e-9
    max_corrector_iterations: int = 12

    def __post_init__(self):
        if not 0 < self.min_step <= self.initial_step:
            raise ValueError("need 0 < min_step <= initial_step")
        if self.max_points < 2 or not self.sup_norm_cap > 0 or not self.residual_tol > 0:
            raise ValueError("invalid branch budget")


@dataclass(frozen=True)
class BranchPoint:
    mu: float
    solution: PeriodicFunction = field(repr=False)
    sup_norm: float
    l2_norm: float
    arclength: float
    fold_flag: bool
    mean_identity_residual: float
    residual: float = 0.0
    min_u: float = math.nan
    dmu_ds: float = 0.0

    def to_dict(self, with_solution: bool = False) -> dict:
        out = {
            "arclength": self.arclength,
            "mu": self.mu,
            "sup_norm": self.sup_norm,
            "l2_norm": self.l2_norm,
            "fold_flag": self.fold_flag,
            "mean_identity_residual": self.mean_identity_residual,
            "residual": self.residual,
            "min_u": self.min_u,
        }
        if with_solution:
            out["solution"] = self.solution.to_dict()
        return out


@dataclass
class Branch:
    problem: BifurcationProblem
    points: list
    termination: dict
    conditions: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, k):
        return self.points[k]

    @property
    def folds(self) -> list:
        return [p for p in self.points if p.fold_flag]

    def mu_sign_summary(self) -> dict:
        mus = np.array([p.mu for p in self.points])
        return {
            "mu_min": float(mus.min()),
            "mu_max": float(mus.max()),
            "all_positive": bool(np.all(mus > 0)),
            "n_folds": len(self.folds),
            "fold_mus": [p.mu for p in self.folds],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = ["arclength", "mu", "sup_norm", "l2_norm", "fold_flag", "mean_identity_residual"]
        writer.writerow(cols)
        for p in self.points:
            d = p.to_dict()
            writer.writerow([repr(float(d[c])) if c != "fold_flag" else str(bool(d[c])).lower() for c in cols])
        return buf.getvalue()


class _BranchOps:
    def __init__(self, p: BifurcationProblem):
        self.p = p
        n = p.e.n_modes
        self.col = Collocation(n)
        self.Lam = self.col.lam(p.s)
        self.D = self.col.P @ self.col.Sd
        self.e = p.e.to_vector()
        self.dG = p.G.derivative()
        self.k = 2 * n + 1

    def _vals(self, x):
        vals = self.col.S @ x
        if not np.min(vals) > 0:
            raise DomainViolation(f"iterate reaches {np.min(vals):.3e} <= 0")
        return vals

    def F(self, x, mu):
        return -self.Lam * x + self.p.c * (self.D @ x) + mu * x - self.col.P @ self.p.G(self._vals(x)) - self.e

    def Fx(self, x, mu):
        dG = self.col.P @ (self.dG(self._vals(x))[:, None] * self.col.S)
        return -np.diag(self.Lam) + self.p.c * self.D + mu * np.eye(self.k) - dG

    def tangent(self, x, mu, previous: Optional[np.ndarray], weight: float) -> np.ndarray:
        """Unit tangent of the solution curve under the ``mu``-weighted norm."""
        J = np.hstack([self.Fx(x, mu), x[:, None]])
        if previous is None:
            # null vector of the k x (k+1) Jacobian
            _, _, vt = np.linalg.svd(J)
            t = vt[-1]
        else:
            A = np.vstack([J, previous[None, :]])
            rhs = np.zeros(self.k + 1)
            rhs[-1] = 1.0
            t = np.linalg.solve(A, rhs)
        return t / _wnorm(t, weight)


def _wnorm(t: np.ndarray, weight: float) -> float:
    return math.sqrt(float(np.dot(t[:-1], t[:-1])) + (weight * t[-1]) ** 2)


def _positive_guard(col):
    def admissible(z_old, z_new):
        old = float(np.min(col.S @ z_old[:-1]))
        new = float(np.min(col.S @ z_new[:-1]))
        return new > 0 and new >= 0.1 * old

    return admissible


def verify_point(u: PeriodicFunction, mu: float, p: BifurcationProblem) -> tuple[float, float]:
    """``(residual, mean-identity residual)`` through the series API on an ``8 x`` grid."""
    m = SUP_REFINEMENT * (2 * u.n_modes + 1)
    vals = synthesize(u, m)
    if not np.min(vals) > 0:
        raise DomainViolation("branch point is not positive")
    G_vals = p.G(vals)
    res = -apply_spectral(u, p.s) + p.c * derivative(u) + mu * u - analyze(G_vals, u.n_modes) - p.e.resized(u.n_modes)
    mean_res = abs(mu * float(np.mean(vals)) - float(np.mean(G_vals)) - p.ebar)
    return res.coefficient_l2(), mean_res


def _make_point(x, mu, p, arclength, dmu_ds) -> BranchPoint:
    u = PeriodicFunction.from_vector(x)
    res, mean_res = verify_point(u, mu, p)
    return BranchPoint(
        mu=float(mu),
        solution=u,
        sup_norm=sup_norm(u),
        l2_norm=l2_norm(u),
        arclength=float(arclength),
        fold_flag=False,
        mean_identity_residual=mean_res,
        residual=res,
        min_u=grid_min(u),
        dmu_ds=float(dmu_ds),
    )


def seed_solution(p: BifurcationProblem, mu: float) -> PeriodicFunction:
    """Positive solution at ``mu`` through the repulsive solver with ``g = G - mu t``."""
    g = p.G - Nonlinearity.from_terms([(mu, 1.0)])
    try:
        rp = RepulsiveProblem(c=p.c, g=g, e=p.e, s=p.s, g4_a=max(mu, 0.0), g4_b=0.0)
        rep = solve_repulsive(rp, IterationConfig(residual_tol=1e-11), ContinuationConfig(strict_conditions=False))
    except Exception as exc:  # any failure here means no seed
        raise SeedFailure(f"no seed solution at mu={mu}: {exc}") from exc
    return rep.solution


def _trace_direction(ops, p, cfg, x0, mu0, direction, start_arclength):
    """One-sided trace; returns points (excluding the seed) and the stop reason."""
    col = ops.col
    guard = _positive_guard(col)
    lo, hi = p.mu_range
    z = np.concatenate([x0, [mu0]])
    weight = max(1.0, sup_norm(PeriodicFunction.from_vector(x0)))
    t = ops.tangent(x0, mu0, None, weight)
    if t[-1] * direction < 0:
        t = -t
    h = cfg.initial_step
    arclength = start_arclength
    points = []
    reason = "max_points"
    while len(points) < cfg.max_points:
        weight = max(1.0, sup_norm(PeriodicFunction.from_vector(z[:-1])))
        pred = z + h * t
        if not guard(z, pred):
            h *= 0.5
            if h < cfg.min_step:
                raise StallAtFold("positivity guard blocks every step", last_point=points[-1] if points else None)
            continue

        def aug(y, pred=pred, t=t, weight=weight):
            r = ops.F(y[:-1], y[-1])
            dz = y - pred
            return np.concatenate([r, [np.dot(t[:-1], dz[:-1]) + weight**2 * t[-1] * dz[-1]]])

        def aug_jac(y, t=t, weight=weight):
            J = np.hstack([ops.Fx(y[:-1], y[-1]), y[:-1, None]])
            row = np.concatenate([t[:-1], [weight**2 * t[-1]]])
            return np.vstack([J, row[None, :]])

        try:
            res = damped_newton(aug, aug_jac, pred, cfg.residual_tol, cfg.max_corrector_iterations, admissible=guard)
        except (NonConvergence, DomainViolation, np.linalg.LinAlgError):
            h *= 0.5
            if h < cfg.min_step:
                raise StallAtFold(f"step underflow near mu={z[-1]:.6g}", last_point=points[-1] if points else None)
            continue
        z_new = res.x
        t_new = ops.tangent(z_new[:-1], z_new[-1], t, max(1.0, sup_norm(PeriodicFunction.from_vector(z_new[:-1]))))
        arclength += _wnorm(z_new - z, weight)
        point = _make_point(z_new[:-1], z_new[-1], p, arclength, t_new[-1])
        if point.residual > 10 * cfg.residual_tol * (1.0 + point.sup_norm):
            h *= 0.5
            if h < cfg.min_step:
                raise StallAtFold(
                    f"verified residual {point.residual:.3e} stays above tolerance near mu={point.mu:.6g}; "
                    "the branch may need more modes",
                    last_point=points[-1] if points else None,
                )
            continue
        points.append(point)
        z, t = z_new, t_new
        if res.iterations <= 4:
            h = min(1.5 * h, cfg.max_step_relative * (1.0 + point.sup_norm))
        mu = z[-1]
        if not lo <= mu <= hi:
            reason = "mu_range"
            break
        if point.sup_norm > cfg.sup_norm_cap:
            reason = "sup_norm_cap"
            break
        if abs(arclength - start_arclength) > cfg.arclength_budget:
            reason = "arclength_budget"
            break
    return points, reason


def trace_branch(p: BifurcationProblem, cfg: BranchConfig = BranchConfig()) -> Branch:
    """Trace both directions from a seed at ``cfg.mu_seed``.

    Points are ordered from the end reached with decreasing ``mu`` (the
    large-norm end) to the other; ``arclength`` is measured from that end.
    """
    conditions = p.validate()
    if not p.mu_range[0] <= cfg.mu_seed <= p.mu_range[1]:
        raise SeedFailure(f"seed mu={cfg.mu_seed} outside {p.mu_range}")
    ops = _BranchOps(p)
    # larger mu keeps the homotopy operator far from singular, so fall back upwards
    candidates = [cfg.mu_seed] + [cfg.mu_seed * 2.0**k for k in range(1, 5) if cfg.mu_seed * 2.0**k <= p.mu_range[1]]
    failure = None
    for mu_seed in candidates:
        try:
            seed_u = seed_solution(p, mu_seed)
            break
        except SeedFailure as exc:
            log.info("seed at mu=%g failed: %s", mu_seed, exc)
            failure = exc
    else:
        raise failure
    x0 = seed_u.to_vector()
    down, reason_down = _trace_direction(ops, p, cfg, x0, mu_seed, -1.0, 0.0)
    up, reason_up = _trace_direction(ops, p, cfg, x0, mu_seed, +1.0, 0.0)
    seed = _make_point(x0, mu_seed, p, 0.0, 0.0)
    ordered = list(reversed(down)) + [seed] + up
    total_down = down[-1].arclength if down else 0.0
    # re-base arclength at the decreasing-mu end; dmu/ds along that orientation
    rebased = []
    for k, pt in enumerate(ordered):
        if k < len(down):
            s_val = total_down - pt.arclength
            dmu = -pt.dmu_ds
        elif k == len(down):
            s_val = total_down
            dmu = ordered[k + 1].dmu_ds if k + 1 < len(ordered) else 0.0
        else:
            s_val = total_down + pt.arclength
            dmu = pt.dmu_ds
        rebased.append((pt, s_val, dmu))
    points = []
    prev_sign = None
    for pt, s_val, dmu in rebased:
        sign = np.sign(dmu) if dmu != 0 else prev_sign
        fold = prev_sign is not None and sign is not None and sign != prev_sign
        points.append(
            BranchPoint(
                mu=pt.mu,
                solution=pt.solution,
                sup_norm=pt.sup_norm,
                l2_norm=pt.l2_norm,
                arclength=s_val,
                fold_flag=bool(fold),
                mean_identity_residual=pt.mean_identity_residual,
                residual=pt.residual,
                min_u=pt.min_u,
                dmu_ds=dmu,
            )
        )
        prev_sign = sign
    termination = {"decreasing_mu_end": reason_down, "increasing_mu_end": reason_up, "seed_mu": mu_seed}
    return Branch(problem=p, points=points, termination=termination, conditions=conditions)


def correct_at(p: BifurcationProblem, x0: np.ndarray, mu: float, tol: float = 1e-9) -> Optional[PeriodicFunction]:
    """Newton at fixed ``mu`` from ``x0``; ``None`` if it fails or loses positivity."""
    ops = _BranchOps(p)
    try:
        guard = _positive_guard(ops.col)
        res = damped_newton(
            lambda x: ops.F(x, mu),
            lambda x: ops.Fx(x, mu),
            x0,
            tol,
            30,
            admissible=lambda a, b: guard(np.append(a, mu), np.append(b, mu)),
        )
    except (NonConvergence, DomainViolation, np.linalg.LinAlgError):
        return None
    u = PeriodicFunction.from_vector(res.x)
    return u if grid_min(u) > 0 else None


def solutions_at(branch: Branch, mu: float, tol: float = 1e-9) -> list:
    """Distinct corrected solutions at ``mu`` from every branch segment crossing it."""
    pts = branch.points
    starts = []
    for a, b in zip(pts[:-1], pts[1:]):
        if (a.mu - mu) * (b.mu - mu) <= 0 and a.mu != b.mu:
            w = (mu - a.mu) / (b.mu - a.mu)
            starts.append((1 - w) * a.solution.to_vector() + w * b.solution.to_vector())
    found = []
    for x0 in starts:
        u = correct_at(branch.problem, x0, mu, tol)
        if u is None:
            continue
        norm = l2_norm(u)
        if all(l2_norm(u - v) > 1e-6 * (1.0 + norm) for v in found):
            found.append(u)
    return found
