"""Numerical checks of the analytical identities satisfied by ``A_s``.

All checks take a :class:`PeriodicFunction` and return plain residuals, so
tests and the ``verify`` command can compare them with their contracts.

The energy identity evaluates, for ``0 < a < b``,

    int_a^b u' A_s u = C/2 * ( B(b) - B(a) - (1+2s) S_right + (1+2s) S_left )

where ``B(x0) = int_R (u(x0)-u(y))^2 |x0-y|^{-1-2s} dy`` and ``S_right`` /
``S_left`` are the strip integrals over ``[a,b] x (b, inf)`` and
``[a,b] x (-inf, a)`` with kernel ``|x-y|^{-2-2s}``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import zeta

from .frac_op import apply_kernel, apply_spectral, kernel_regular_part, normalization_C1s, order_of
from .quadrature import composite_gauss, gauss_legendre, singular_integral
from .trig_field import TWO_PI, PeriodicFunction, QuadratureConfig, derivative, grid, hs_energy, l2_norm


def check_zero_mean(f: PeriodicFunction, s, path: str = "spectral", q: QuadratureConfig = QuadratureConfig()) -> float:
    """``|int_0^{2pi} A_s f dt|`` through the multiplier or the kernel route.

    On the kernel route the period integral uses the equispaced rule on
    ``2N+1`` nodes, exact for a degree-``N`` trigonometric polynomial, so
    the residual measures only the quadrature error of ``apply_kernel``.
    """
    if path == "spectral":
        return TWO_PI * abs(apply_spectral(f, s).a0)
    if path == "kernel":
        m = 2 * f.n_modes + 1
        values = apply_kernel(f, grid(m), s, q)
        return abs(TWO_PI * float(np.mean(values)))
    raise ValueError(f"unknown path {path!r}")


def check_orthogonality(f: PeriodicFunction, s) -> float:
    """``|int_0^{2pi} A_s f * f' dt|`` by Parseval on the coefficients."""
    g = apply_spectral(f, s)
    d = derivative(f)
    return abs(math.pi * float(np.dot(g.a, d.a) + np.dot(g.b, d.b)))


def check_poincare(f: PeriodicFunction, s) -> tuple[float, float]:
    """``(||f - mean||^2, (2 pi)^{2s} * hs_energy(f, s))``; the first never exceeds the second."""
    s = order_of(s)
    lhs = l2_norm(f.centered()) ** 2
    rhs = TWO_PI ** (2.0 * s) * hs_energy(f, s)
    return lhs, rhs


@dataclass(frozen=True)
class EnergyBreakdown:
    lhs: float
    boundary_b: float
    boundary_a: float
    strip_right: float
    strip_left: float
    rhs_total: float
    a: float
    b: float
    quadrature_error_estimate: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs_total)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["residual"] = self.residual
        return out


def _gauss_on(lo: float, hi: float, order: int):
    x, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    return lo + half * (1.0 + x), half * w


def boundary_term(f: PeriodicFunction, x0: float, s, q: QuadratureConfig = QuadratureConfig()):
    """``int_R (f(x0)-f(y))^2 |x0-y|^{-1-2s} dy`` and its error estimate.

    Periodicity folds the line onto one period with the periodized kernel, so
    no far-field truncation is involved; the two sides ``x0 +- h`` are paired
    on ``(0, pi)``.
    """
    s = order_of(s)
    p = 1.0 + 2.0 * s

    def smooth_part(h):
        up = f.increment(x0, h)
        down = f.increment(x0, -h)
        return (up**2 + down**2) / h**2 * (1.0 + h**p * kernel_regular_part(h, s))

    value, err = singular_integral(smooth_part, math.pi, 1.0 - 2.0 * s, q.abs_tol, q.max_refinement_depth)
    return float(value), float(err)


def _strip(f: PeriodicFunction, a: float, b: float, s: float, q: QuadratureConfig, side: str):
    """Strip integral, written over the offset ``sigma = |x - y|``.

    ``S = int_0^inf sigma^{-2-2s} J(sigma) dsigma`` with ``J(sigma)`` the
    integral of ``(f(x) - f(x +- sigma))^2`` over the admissible ``x``.  For
    ``sigma < b - a`` the ``x``-range has length ``sigma`` and
    ``J = sigma^3 phi(sigma)`` with ``phi`` smooth, which leaves the weight
    ``sigma^{1-2s}``.  ``J`` is ``2 pi``-periodic once ``sigma >= b - a``, so the
    tail past ``T`` is summed in closed form with a Hurwitz zeta weight.
    """
    qq = 2.0 + 2.0 * s
    length = b - a
    n = f.n_modes
    order_v = 32 + int(math.ceil(n * length))
    v, wv = _gauss_on(0.0, 1.0, order_v)

    if side == "right":
        # y = x + sigma > b, x in [max(a, b - sigma), b]
        def near_diff(sig):
            return f.increment(b - sig[:, None] * v, sig[:, None])

        def far_diff(x, sig):
            return f.increment(x, sig)
    else:
        # y = x - sigma < a, x in [a, min(b, a + sigma)]
        def near_diff(sig):
            return f.increment(a + sig[:, None] * (v - 1.0), sig[:, None])

        def far_diff(x, sig):
            return f.increment(x - sig, sig)

    def phi(sig):
        sig = np.asarray(sig, dtype=float)
        return ((near_diff(sig) / sig[:, None]) ** 2) @ wv

    near, err_near = singular_integral(phi, length, 1.0 - 2.0 * s, q.abs_tol, q.max_refinement_depth)

    x, wx = _gauss_on(a, b, 32 + int(math.ceil(2 * n * length)))

    def j_full(sig):
        sig = np.asarray(sig, dtype=float)
        return (far_diff(x[None, :], sig[:, None]) ** 2) @ wx

    periods = max(q.tail_cutoff_periods, int(math.ceil(length / TWO_PI)) + 1)
    cutoff = TWO_PI * periods
    mid, err_mid = composite_gauss(
        lambda sig: sig**-qq * j_full(sig), length, cutoff, q.abs_tol, q.max_refinement_depth
    )

    def tail(tau):
        return j_full(tau) * TWO_PI**-qq * zeta(qq, (cutoff + tau) / TWO_PI)

    far, err_far = composite_gauss(tail, 0.0, TWO_PI, q.abs_tol, q.max_refinement_depth)
    return float(near + mid + far), float(err_near + err_mid + err_far)


def strip_right(f, a, b, s, q: QuadratureConfig = QuadratureConfig()):
    """``int_a^b int_b^inf (f(x)-f(y))^2 |x-y|^{-2-2s} dy dx`` with error estimate."""
    return _strip(f, a, b, order_of(s), q, "right")


def strip_left(f, a, b, s, q: QuadratureConfig = QuadratureConfig()):
    """``int_a^b int_{-inf}^a (f(x)-f(y))^2 |x-y|^{-2-2s} dy dx`` with error estimate."""
    return _strip(f, a, b, order_of(s), q, "left")


def energy_lhs(f: PeriodicFunction, a: float, b: float, s, q: QuadratureConfig = QuadratureConfig()):
    du = derivative(f)
    op = apply_spectral(f, s)
    return composite_gauss(lambda t: du(t) * op(t), a, b, q.abs_tol, q.max_refinement_depth)


def energy_identity(f: PeriodicFunction, a: float, b: float, s, q: QuadratureConfig = QuadratureConfig()) -> EnergyBreakdown:
    """Both sides of the energy identity on ``[a, b]``.

    Needs ``1/2 < s < 1``: for smaller ``s`` the strip integrals diverge at
    the corners ``x = y = a`` and ``x = y = b``.
    """
    s = order_of(s)
    if not 0.0 < a < b:
        raise ValueError(f"need 0 < a < b, got a={a}, b={b}")
    if not 0.5 < s < 1.0:
        raise ValueError(f"the strip integrals need s in (1/2, 1), got s={s}")
    lhs, e0 = energy_lhs(f, a, b, s, q)
    bb, e1 = boundary_term(f, b, s, q)
    ba, e2 = boundary_term(f, a, s, q)
    sr, e3 = strip_right(f, a, b, s, q)
    sl, e4 = strip_left(f, a, b, s, q)
    c = normalization_C1s(s)
    rhs = 0.5 * c * (bb - ba - (1.0 + 2.0 * s) * sr + (1.0 + 2.0 * s) * sl)
    err = e0 + 0.5 * c * (e1 + e2 + (1.0 + 2.0 * s) * (e3 + e4))
    return EnergyBreakdown(float(lhs), bb, ba, sr, sl, float(rhs), float(a), float(b), float(err))
