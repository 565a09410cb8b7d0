"""Modal solves of ``A_s u + gamma u + c u' = r``.

Every fixed-point map in the package reduces to this constant-coefficient
problem.  Mode ``n`` couples ``(a_n, b_n)`` through a 2x2 system with
determinant ``(n^{2s} + gamma)^2 + c^2 n^2``, positive for ``n >= 1``.
"""

from __future__ import annotations

import numpy as np

from .errors import SolvabilityViolation
from .frac_op import multipliers
from .trig_field import PeriodicFunction, derivative

MEAN_TOL = 1e-12


def solve_linear(r: PeriodicFunction, s, gamma: float = 0.0, c: float = 0.0) -> PeriodicFunction:
    """Solve ``A_s u + gamma u + c u' = r`` mode by mode.

    With ``gamma = 0`` constants are in the kernel: the forcing must have zero
    mean and the mean-zero representative is returned.
    """
    gamma = float(gamma)
    c = float(c)
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    n = np.arange(1, r.n_modes + 1, dtype=float)
    diag = multipliers(r.n_modes, s) + gamma
    cn = c * n
    det = diag**2 + cn**2
    # u' maps (a, b) -> (n b, -n a), so row a reads diag*a + cn*b = ra
    a = (diag * r.a - cn * r.b) / det
    b = (diag * r.b + cn * r.a) / det
    if gamma > 0:
        a0 = r.a0 / gamma
    else:
        if abs(r.a0) > MEAN_TOL:
            raise SolvabilityViolation(f"forcing mean {r.a0:.3e} must vanish when gamma = 0")
        a0 = 0.0
    return PeriodicFunction(a0, a, b)


def apply_linear(u: PeriodicFunction, s, gamma: float = 0.0, c: float = 0.0) -> PeriodicFunction:
    """The forward operator ``A_s u + gamma u + c u'``."""
    lam = multipliers(u.n_modes, s)
    du = derivative(u)
    return PeriodicFunction(gamma * u.a0, lam * u.a + gamma * u.a + c * du.a, lam * u.b + gamma * u.b + c * du.b)
