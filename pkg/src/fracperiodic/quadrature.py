"""Gauss rules on geometrically graded panels for weakly singular integrands.

Integrals of the form ``int_0^L phi(h) h**beta dh`` with ``phi`` smooth and
``beta > -1`` are split into panels ``[L/2^(k+1), L/2^k]`` (Gauss-Legendre) and
an innermost panel ``[0, L/2^d]`` carrying the exact ``h**beta`` weight
(Gauss-Jacobi).  Depth and order are raised together until two successive
levels agree to ``abs_tol``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import QuadratureNonConvergence


@lru_cache(maxsize=None)
def gauss_legendre(m: int):
    x, w = roots_legendre(m)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def gauss_jacobi_origin(m: int, beta: float):
    """Nodes/weights on ``[0, 1]`` for the weight ``h**beta``."""
    x, w = roots_jacobi(m, 0.0, beta)
    nodes = 0.5 * (1.0 + x)
    weights = w * 0.5 ** (1.0 + beta)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def level_shape(level: int, depth_cap: int = 64) -> tuple[int, int]:
    """(panel depth, nodes per panel) used at refinement ``level``."""
    return min(2 + 2 * level, depth_cap), 8 + 4 * level


def graded_rule(length: float, beta: float, depth: int, order: int):
    """Composite nodes/weights for ``int_0^length phi(h) h**beta dh``."""
    nodes, weights = [], []
    x, w = gauss_legendre(order)
    hi = length
    for _ in range(depth):
        lo = 0.5 * hi
        h = lo + (hi - lo) * 0.5 * (1.0 + x)
        nodes.append(h)
        weights.append(0.5 * (hi - lo) * w * h**beta)
        hi = lo
    jn, jw = gauss_jacobi_origin(order, float(beta))
    nodes.append(hi * jn)
    weights.append(jw * hi ** (1.0 + beta))
    return np.concatenate(nodes), np.concatenate(weights)


def singular_integral(
    phi: Callable[[np.ndarray], np.ndarray],
    length: float,
    beta: float,
    abs_tol: float,
    max_depth: int,
    depth_cap: int = 64,
):
    """Adaptive ``int_0^length phi(h) h**beta dh``.

    ``phi`` maps a 1-D node array to an array whose last axis runs over the
    nodes; leading axes (several integrals at once) are allowed.  ``depth_cap``
    limits the grading when ``phi`` loses digits close to the origin.  Returns
    ``(value, error_estimate)``.
    """
    previous = None
    for level in range(max_depth + 1):
        depth, order = level_shape(level, depth_cap)
        h, w = graded_rule(length, beta, depth, order)
        value = np.asarray(phi(h)) @ w
        if previous is not None:
            err = float(np.max(np.abs(value - previous)))
            if err <= abs_tol:
                return value, err
        previous = value
    raise QuadratureNonConvergence(
        f"graded quadrature did not reach {abs_tol:g} within {max_depth} refinements (last change {err:.3e})"
    )


def composite_gauss(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, abs_tol: float, max_depth: int):
    """Adaptive composite Gauss-Legendre for smooth integrands on ``[a, b]``."""
    previous = None
    panels = max(1, int(np.ceil(abs(b - a))))
    for level in range(max_depth + 1):
        order = 16 + 8 * level
        x, w = gauss_legendre(order)
        edges = np.linspace(a, b, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = (mid[:, None] + half[:, None] * x).ravel()
        weights = (half[:, None] * w).ravel()
        value = np.asarray(f(nodes)) @ weights
        if previous is not None:
            err = float(np.max(np.abs(value - previous)))
            if err <= abs_tol:
                return value, err
        previous = value
    raise QuadratureNonConvergence(f"composite Gauss rule did not reach {abs_tol:g}")
