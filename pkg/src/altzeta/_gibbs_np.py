"""Lane-vectorized Gibbs sweeps for the interlacing conditional law (numpy backend).

Semantics are fixed and must stay bit-identical to the compiled backend:

* every coordinate update consumes exactly one pre-drawn uniform;
* the conditional CDF of coordinate k given the others is the integral of
  prod_{j != k} |t - x_j| over (u_k, t), a polynomial of degree N-2, so a
  Gauss-Legendre rule with ceil((N-1)/2) points on [0, t] evaluates it
  exactly;
* inversion is bracketed bisection with a fixed 52 iterations;
* all inner reductions run in ascending index order with no fused
  multiply-add (the compiled kernel is built with -ffp-contract=off).
"""

from __future__ import annotations

import numpy as np


def gl_rule_01(n_coords: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights mapped to [0, 1], exact through degree n_coords - 1."""
    m = max(1, (n_coords + 1) // 2)
    x, w = np.polynomial.legendre.leggauss(m)
    return (x + 1.0) / 2.0, w / 2.0


def _cdf(x: np.ndarray, k: int, a: np.ndarray, t: np.ndarray,
         nodes: np.ndarray, wts: np.ndarray) -> np.ndarray:
    """Unnormalized conditional CDF at t, per lane.  x: (L, K); a, t: (L,)."""
    span = t - a
    y = a[:, None] + span[:, None] * nodes[None, :]  # (L, m)
    acc = np.ones_like(y)
    K = x.shape[1]
    for j in range(K):
        if j != k:
            acc = acc * np.abs(y - x[:, j : j + 1])
    tot = np.zeros_like(span)
    for i in range(nodes.shape[0]):
        tot = tot + wts[i] * acc[:, i]
    return span * tot


def gibbs_chunks(
    u: np.ndarray,
    uniforms: np.ndarray,
    keep: int,
    burn_in: int,
    thinning: int,
    nodes: np.ndarray,
    wts: np.ndarray,
) -> np.ndarray:
    """Run per-lane Gibbs chains; u: (L, N), uniforms: (L, sweeps, K) -> (L, keep, K)."""
    L, sweeps, K = uniforms.shape
    if u.shape != (L, K + 1):
        raise ValueError(f"grid shape {u.shape} does not match lanes {(L, K + 1)}")
    if sweeps != burn_in + keep * thinning:
        raise ValueError("sweep count disagrees with burn-in/keep/thinning")
    x = 0.5 * (u[:, :-1] + u[:, 1:])
    x = np.ascontiguousarray(x)
    out = np.empty((L, keep, K), dtype=np.float64)
    kept = 0
    for t in range(sweeps):
        for k in range(K):
            a = u[:, k]
            b = u[:, k + 1]
            total = _cdf(x, k, a, b, nodes, wts)
            target = uniforms[:, t, k] * total
            lo = a.copy()
            hi = b.copy()
            for _ in range(52):
                mid = 0.5 * (lo + hi)
                below = _cdf(x, k, a, mid, nodes, wts) < target
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
            x[:, k] = 0.5 * (lo + hi)
        if t >= burn_in and (t - burn_in) % thinning == 0:
            out[:, kept, :] = x
            kept += 1
    return out
