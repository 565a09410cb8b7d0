"""Collocation matrices and a damped Newton iteration shared by the solvers.

Coefficient vectors use the layout ``[a0, a_1..a_N, b_1..b_N]``.  Pointwise
products are formed on a grid of ``refinement * (2N + 1)`` nodes and
projected back, which is the matrix form of :func:`compose_nonlinearity`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .errors import NonConvergence
from .frac_op import multipliers
from .trig_field import DEALIAS_REFINEMENT, PeriodicFunction, grid

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Collocation:
    n_modes: int
    refinement: int = DEALIAS_REFINEMENT

    @property
    def m(self) -> int:
        return self.refinement * (2 * self.n_modes + 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return grid(self.m)

    @cached_property
    def _phase(self) -> np.ndarray:
        return self.nodes[:, None] * np.arange(1, self.n_modes + 1)

    @cached_property
    def S(self) -> np.ndarray:
        """Synthesis: coefficients -> grid values."""
        ph = self._phase
        return np.hstack([np.ones((self.m, 1)), np.cos(ph), np.sin(ph)])

    @cached_property
    def Sd(self) -> np.ndarray:
        """Coefficients -> grid values of the derivative."""
        ph = self._phase
        n = np.arange(1, self.n_modes + 1)
        return np.hstack([np.zeros((self.m, 1)), -n * np.sin(ph), n * np.cos(ph)])

    @cached_property
    def P(self) -> np.ndarray:
        """Grid values -> coefficients (discrete projection)."""
        ph = self._phase
        scale = 2.0 / self.m
        return np.vstack([np.full((1, self.m), 1.0 / self.m), scale * np.cos(ph).T, scale * np.sin(ph).T])

    def lam(self, s) -> np.ndarray:
        """``A_s`` on the coefficient layout (zero on the mean)."""
        mult = multipliers(self.n_modes, s)
        return np.concatenate(([0.0], mult, mult))


def mean_free(x: np.ndarray) -> np.ndarray:
    """Drop the mean entry from a coefficient vector."""
    return x[1:]


def with_mean(y: np.ndarray, mean: float = 0.0) -> np.ndarray:
    return np.concatenate(([mean], y))


def as_function(x: np.ndarray) -> PeriodicFunction:
    return PeriodicFunction.from_vector(x)


@dataclass
class NewtonResult:
    x: np.ndarray
    residual_history: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def damped_newton(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    tol: float,
    max_iterations: int,
    admissible: Optional[Callable[[np.ndarray, np.ndarray], bool]] = None,
    max_halvings: int = 30,
    raise_on_failure: bool = True,
) -> NewtonResult:
    """Newton with backtracking on the residual norm.

    ``admissible(x_old, x_new)`` can veto a trial point (positivity guard);
    vetoed or non-decreasing steps are halved up to ``max_halvings`` times.
    """
    x = np.array(x0, dtype=float)
    r = residual(x)
    norm = float(np.linalg.norm(r))
    history = [norm]
    for it in range(1, max_iterations + 1):
        if norm <= tol:
            return NewtonResult(x, history, it - 1, True)
        J = jacobian(x)
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            dx = np.linalg.lstsq(J, -r, rcond=None)[0]
        step = 1.0
        for _ in range(max_halvings + 1):
            trial = x + step * dx
            if admissible is None or admissible(x, trial):
                try:
                    r_trial = residual(trial)
                except ValueError:
                    r_trial = None
                if r_trial is not None and np.all(np.isfinite(r_trial)):
                    trial_norm = float(np.linalg.norm(r_trial))
                    if trial_norm < (1.0 - 1e-4 * step) * norm or trial_norm <= tol:
                        break
            step *= 0.5
        else:
            log.debug("newton line search exhausted at iteration %d (residual %.3e)", it, norm)
            if raise_on_failure:
                raise NonConvergence(f"line search failed at residual {norm:.3e}", last_residual=norm)
            return NewtonResult(x, history, it, False)
        x, r, norm = trial, r_trial, trial_norm
        history.append(norm)
    if norm <= tol:
        return NewtonResult(x, history, max_iterations, True)
    if raise_on_failure:
        raise NonConvergence(f"newton stopped after {max_iterations} iterations at residual {norm:.3e}", last_residual=norm)
    return NewtonResult(x, history, max_iterations, False)
