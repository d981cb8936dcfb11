"""Adaptive Gauss-Legendre quadrature.

Panel-splitting with a fixed node count per panel; integrands must accept
numpy arrays and may return complex values.  Endpoint algebraic
singularities are handled by power-law substitutions that callers request
explicitly.
"""

from __future__ import annotations

from functools import lru_cache
from math import ceil
from typing import Callable

import numpy as np

from .errors import QuadratureError

DEFAULT_NODES = 24
MAX_DEPTH = 30


@lru_cache(maxsize=None)
def _gl_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _panel(f: Callable, a: float, b: float, nodes: int) -> tuple[complex, float]:
    """Gauss-Legendre estimate and absolute-value estimate on one panel."""
    x, w = _gl_rule(nodes)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    vals = np.asarray(f(mid + half * x))
    return half * complex(np.sum(w * vals)), abs(half) * float(np.sum(w * np.abs(vals)))


def adaptive_gl(
    f: Callable,
    a: float,
    b: float,
    rtol: float = 1e-10,
    atol: float = 0.0,
    nodes: int = DEFAULT_NODES,
    max_depth: int = MAX_DEPTH,
) -> complex:
    """Integrate a vectorized integrand over [a, b] to the requested tolerance."""
    rough, rough_abs = _panel(f, a, b, nodes)
    budget = max(atol, rtol * max(abs(rough), rough_abs * 1e-3), 1e-305)

    def recurse(lo: float, hi: float, tol: float, depth: int) -> complex:
        whole, _ = _panel(f, lo, hi, nodes)
        mid = 0.5 * (lo + hi)
        left, labs = _panel(f, lo, mid, nodes)
        right, rabs = _panel(f, mid, hi, nodes)
        err = abs(left + right - whole)
        # 5e-16*(|.|) floor: cancellation noise, cannot be refined away
        if err <= max(tol, 5e-16 * (labs + rabs)):
            return left + right
        if depth >= max_depth:
            raise QuadratureError(
                f"panel [{lo:g}, {hi:g}] stuck at error {err:.3e} (budget {tol:.3e})"
            )
        return recurse(lo, mid, tol / 2.0, depth + 1) + recurse(mid, hi, tol / 2.0, depth + 1)

    return recurse(a, b, budget, 0)


def with_left_power_map(f: Callable, a: float, b: float, c: float) -> Callable:
    """Transform so that f ~ (u - a)^(c-1) near a integrates smoothly.

    Returns g on [0, 1] with integral(g) = integral(f, a, b); requires c > 0.
    The mapped point is clamped one ulp inside the interval so a point that
    rounds onto the endpoint never evaluates f there (f(a) may be inf); the
    clamp keeps g continuous, and since c > 0 the plateau it introduces sits
    below double-precision noise.
    """
    p = max(1, ceil(2.0 / c))
    width = b - a
    inner = np.nextafter(a, b)

    def g(t: np.ndarray):
        tp = np.asarray(t) ** (p - 1)
        u = np.maximum(a + width * tp * t, inner)
        return f(u) * (width * p) * tp

    return g


def with_right_power_map(f: Callable, a: float, b: float, c: float) -> Callable:
    """Same as with_left_power_map but for a singularity at b."""
    p = max(1, ceil(2.0 / c))
    width = b - a
    inner = np.nextafter(b, a)

    def g(t: np.ndarray):
        tp = np.asarray(t) ** (p - 1)
        u = np.minimum(b - width * tp * t, inner)
        return f(u) * (width * p) * tp

    return g


def integrate_weighted(
    f: Callable,
    a: float,
    b: float,
    c_left: float = 1.0,
    c_right: float = 1.0,
    rtol: float = 1e-10,
    nodes: int = DEFAULT_NODES,
) -> complex:
    """Integrate with algebraic behavior (u-a)^(c_left-1), (b-u)^(c_right-1) at the ends."""
    if not (c_left > 0 and c_right > 0):
        raise QuadratureError(
            f"endpoint exponents must be positive, got {c_left:g}, {c_right:g}"
        )
    mid = 0.5 * (a + b)
    total = 0j
    if c_left < 2:
        total += adaptive_gl(with_left_power_map(f, a, mid, c_left), 0.0, 1.0, rtol / 2, nodes=nodes)
    else:
        total += adaptive_gl(f, a, mid, rtol / 2, nodes=nodes)
    if c_right < 2:
        total += adaptive_gl(with_right_power_map(f, mid, b, c_right), 0.0, 1.0, rtol / 2, nodes=nodes)
    else:
        total += adaptive_gl(f, mid, b, rtol / 2, nodes=nodes)
    return total


def scalarized(f: Callable) -> Callable:
    """Wrap a scalar-argument integrand for the vectorized panel evaluator."""

    def g(x: np.ndarray):
        return np.array([f(float(xi)) for xi in np.atleast_1d(x)])

    return g
