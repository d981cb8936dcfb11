"""Interlaced sampling and the Monte-Carlo estimators built on it.

A draw from the interlacing law on a grid u_1 < ... < u_N places one
coordinate in each gap, with density proportional to the Vandermonde factor
prod_{i<j} (x_j - x_i).  Two samplers are provided:

* a Gibbs sweep whose coordinate conditionals are inverted exactly
  (polynomial CDF, fixed-iteration bisection) — the workhorse;
* synchronized-rounds rejection against box proposals — an independent
  oracle, exact but exponentially slow in N (capped).

On top of the sampler sit the estimators: the weighted alternating series as
a normalized power-product moment, the family of fixed-point moments with
their exact closed forms, an exponential-sum moment identity valid on any
grid, and the generalized Vandermonde ratio as a sampled determinant ratio.

Estimates are deterministic functions of (seed, n, chunk): see _mc and _rng.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log
from typing import Iterator

import numpy as np
from scipy.special import loggamma, rgamma

from . import _backend, _gibbs_np, _mc, _rng
from .determinants import OrderedGrid, squares_grid
from .errors import CapExceeded, DomainError
from .eta_core import as_complex, h_factor
from ._mc import MCEstimate, SamplerConfig

REJECTION_CAP = 6


@dataclass(frozen=True)
class InterlacedSample:
    """One interlaced configuration x sitting in the gaps of the grid u."""

    x: tuple[float, ...]
    u: tuple[float, ...]


@dataclass(frozen=True)
class DensityValue:
    log_density: float
    in_support: bool


def _interlaces(x: np.ndarray, u: np.ndarray) -> bool:
    return bool(np.all(u[:-1] < x) and np.all(x < u[1:]))


def dixon_anderson_log_density(x, u, alpha: float = 1.0) -> DensityValue:
    """Log of the interlacing density with general exponent alpha > 0.

    For alpha = 1 this is (N-1)! V(x) / V(u); the general form weights each
    |x_k - u_n| by alpha - 1 and renormalizes with Gamma factors.  Sampling
    elsewhere in the package is alpha = 1 only; this evaluator is exposed for
    density checks.
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    grid = OrderedGrid.of(u)
    uu = grid.array()
    xx = np.asarray([float(v) for v in x], dtype=np.float64)
    N = len(uu)
    if xx.shape != (N - 1,):
        raise DomainError(f"need {N - 1} inner points for a grid of {N}, got {xx.shape}")
    if not (np.all(np.diff(xx) > 0) and _interlaces(xx, uu)):
        return DensityValue(log_density=-np.inf, in_support=False)
    val = lgamma(N * alpha) - N * lgamma(alpha)
    for j in range(N - 1):
        for i in range(j):
            val += log(xx[j] - xx[i])
    val += (alpha - 1.0) * float(np.log(np.abs(xx[:, None] - uu[None, :])).sum())
    for j in range(N):
        for i in range(j):
            val -= (2.0 * alpha - 1.0) * log(uu[j] - uu[i])
    return DensityValue(log_density=float(val), in_support=True)


def _gibbs_block(u_lanes: np.ndarray, cfg: SamplerConfig, keep: int,
                 chunk_lo: int, tag: int, force: str | None = None) -> np.ndarray:
    """Run `count` chains (count = len(u_lanes)) keeping `keep` states each."""
    count, N = u_lanes.shape
    K = N - 1
    sweeps = cfg.burn_in + keep * cfg.thinning
    uniforms = np.empty((count, sweeps, K), dtype=np.float64)
    for i in range(count):
        uniforms[i] = _rng.chunk_stream(cfg.seed, chunk_lo + i, tag).random((sweeps, K))
    nodes, wts = _gibbs_np.gl_rule_01(K)
    return _backend.gibbs_chunks(
        u_lanes, uniforms, keep, cfg.burn_in, cfg.thinning, nodes, wts, force=force
    )


def gibbs_sample_array(u, cfg: SamplerConfig, n: int,
                       tag: int = _rng.TAG_GIBBS, force: str | None = None) -> np.ndarray:
    """First n Gibbs draws as an (n, N-1) array (chunk layout as the estimators see it)."""
    grid = OrderedGrid.of(u)
    if len(grid) < 2:
        raise DomainError("interlacing needs at least two grid points")
    eff = _mc.effective_chunk(n, cfg.chunk)
    n_chunks = -(-n // eff)
    rows = np.broadcast_to(grid.array(), (n_chunks, len(grid)))
    samples = _gibbs_block(np.ascontiguousarray(rows), cfg, eff, 0, tag, force=force)
    return samples.reshape(n_chunks * eff, len(grid) - 1)[:n]


def dixon_anderson_gibbs(u, cfg: SamplerConfig) -> Iterator[InterlacedSample]:
    """Endless stream of Gibbs draws from the interlacing law on u."""
    grid = OrderedGrid.of(u)
    if len(grid) < 2:
        raise DomainError("interlacing needs at least two grid points")
    gu = grid.array()
    rows = np.ascontiguousarray(gu[None, :])
    chunk_idx = 0
    while True:
        samples = _gibbs_block(rows, cfg, cfg.chunk, chunk_idx, _rng.TAG_GIBBS)[0]
        for row in samples:
            assert _interlaces(row, gu)
            yield InterlacedSample(x=tuple(float(v) for v in row), u=grid.u)
        chunk_idx += 1


def rejection_samples(u_lanes: np.ndarray, count: int, gen: np.random.Generator,
                      max_rounds: int = 1_000_000) -> np.ndarray:
    """Exact rejection draws, synchronized rounds.

    u_lanes is (N,) for `count` draws from one grid, or (count, N) for one
    draw per lane-specific grid.  Every round draws uniforms for all slots;
    finished slots discard theirs, so output depends only on the stream.
    """
    u2 = np.atleast_2d(np.asarray(u_lanes, dtype=np.float64))
    if u2.shape[0] == 1:
        u2 = np.broadcast_to(u2, (count, u2.shape[1]))
    elif u2.shape[0] != count:
        raise DomainError(f"{u2.shape[0]} grids for {count} requested draws")
    N = u2.shape[1]
    K = N - 1
    lo = u2[:, :-1]
    span = u2[:, 1:] - u2[:, :-1]
    bound = np.ones(count)
    for j in range(K):
        for i in range(j):
            bound = bound * (u2[:, j + 1] - u2[:, i])
    out = np.empty((count, K), dtype=np.float64)
    alive = np.ones(count, dtype=bool)
    for _ in range(max_rounds):
        draw = gen.random((count, K + 1))
        x = lo + draw[:, :K] * span
        vdm = np.ones(count)
        for j in range(K):
            for i in range(j):
                vdm = vdm * (x[:, j] - x[:, i])
        accept = alive & (draw[:, K] * bound < vdm)
        out[accept] = x[accept]
        alive &= ~accept
        if not alive.any():
            return out
    raise RuntimeError(f"rejection sampler exceeded {max_rounds} rounds")


def dixon_anderson_rejection(u, cfg: SamplerConfig) -> Iterator[InterlacedSample]:
    """Endless stream of exact rejection draws; grids capped at REJECTION_CAP points.

    Acceptance decays like the volume ratio of the interlacing wedge to its
    bounding box, so this is an oracle for small N, not a workhorse.
    """
    grid = OrderedGrid.of(u)
    if len(grid) > REJECTION_CAP:
        raise CapExceeded(f"rejection sampling capped at N={REJECTION_CAP}, got {len(grid)}")
    if len(grid) < 2:
        raise DomainError("interlacing needs at least two grid points")
    gu = grid.array()
    chunk_idx = 0
    while True:
        gen = _rng.chunk_stream(cfg.seed, chunk_idx, _rng.TAG_REJECTION)
        samples = rejection_samples(gu, cfg.chunk, gen)
        for row in samples:
            assert _interlaces(row, gu)
            yield InterlacedSample(x=tuple(float(v) for v in row), u=grid.u)
        chunk_idx += 1


def _log_power_sums(samples: np.ndarray, z: complex, shift: float, ln_norm: float) -> np.ndarray:
    """Per-chunk sums of exp((z/2) * (sum_k log|X_k - shift| - ln_norm)).

    Shared by both backends so cross-backend agreement reduces to the
    sampler's own bit-identity.
    """
    d = np.abs(samples - shift) if shift != 0.0 else samples
    ln = np.log(np.maximum(d, 1e-300)).sum(axis=2)
    vals = np.exp((z / 2.0) * (ln - ln_norm))
    return vals.sum(axis=1)


def _gibbs_moment(method: str, grid: OrderedGrid, z: complex, shift: float, ln_norm: float,
                  cfg: SamplerConfig, n: int, scale: complex, workers: int,
                  tag: int = _rng.TAG_GIBBS) -> MCEstimate:
    rows1 = grid.array()[None, :]

    def chunk_sums(lo: int, count: int, eff: int) -> np.ndarray:
        rows = np.ascontiguousarray(np.broadcast_to(rows1, (count, len(grid))))
        samples = _gibbs_block(rows, cfg, eff, lo, tag)
        return _log_power_sums(samples, z, shift, ln_norm)

    return _mc.run_chunked(method, n, cfg, chunk_sums, scale=scale, workers=workers)


def _reject_near_even_negative(z: complex, guard: float = 1e-6) -> None:
    if abs(z.imag) < guard and z.real < -1.0:
        k = round(-z.real / 2.0)
        if k >= 1 and abs(z.real + 2.0 * k) < guard and abs(z.imag) < guard:
            raise DomainError(f"s = {z} is within {guard:g} of an even negative integer")


def eta_mc(s, N: int, cfg: SamplerConfig, n_samples: int, workers: int = 1) -> MCEstimate:
    """Level-N series as half the normalized power-product moment.

    eta_N(s) = (h_N(s)/2) E[ prod_k (X_k / (k(k+1)))^(s/2) ] with X drawn from
    the interlacing law on the squared-integer grid; the gap normalizers
    multiply to N!(N-1)!.
    """
    z = as_complex(s)
    _reject_near_even_negative(z)
    if N < 2:
        raise DomainError(f"sampled estimator needs N >= 2, got {N}")
    grid = squares_grid(N)
    ln_norm = lgamma(N + 1) + lgamma(N)
    scale = h_factor(z, N) / 2.0
    return _gibbs_moment("eta_mc", grid, z, 0.0, ln_norm, cfg, n_samples, scale, workers)


def psi_closed(x: int, N: int, s) -> complex:
    """Closed form of the fixed-point moment at grid index x.

    psi(1) = N^(s/2) Gamma(N) / Gamma(N + s/2); for x >= 2 the same with
    N^(s/2) replaced by ((N-x)!(N+x)! / (x^2 N! (N-1)!))^(s/2).  At s = 2 this
    is 1 / (x^2 |a_{x,N}|), which decreases to x^(-2) as N grows.
    """
    z = as_complex(s)
    if not (isinstance(x, int) and 1 <= x <= N):
        raise DomainError(f"fixed point must satisfy 1 <= x <= N, got x={x!r}, N={N}")
    if x == 1:
        lr = log(float(N))
    else:
        lr = (
            lgamma(N - x + 1)
            + lgamma(N + x + 1)
            - 2.0 * log(float(x))
            - lgamma(N + 1)
            - lgamma(N)
        )
    # single log-space exponent: exp(lgamma(N)) alone overflows for N >~ 170
    return complex(np.exp((z / 2.0) * lr + lgamma(N) - loggamma(N + z / 2.0)))


def _psi_prefactor(x: int, N: int, z: complex) -> complex:
    inv_gamma = complex(rgamma(1.0 + z / 2.0))
    if x == 0:
        return 0.5 * inv_gamma
    if x == 1:
        return complex(np.exp((z / 2.0) * log(2.0 * N / (N + 1.0)))) * inv_gamma
    return complex(np.exp((z / 2.0) * log(2.0))) * inv_gamma


def psi_mc(x: int, N: int, s, cfg: SamplerConfig, n_samples: int, workers: int = 1) -> MCEstimate:
    """Sampled fixed-point moment around grid value x^2 (x = 0 targets the series limit).

    The estimator averages prod_k |X_k - x^2|^(s/2) / (N!(N-1)!)^(s/2) over
    interlaced draws and applies the x-dependent normalizer; for x >= 1 its
    expectation is exactly psi_closed(x, N, s), for x = 0 it converges to the
    limiting alternating zeta value as N grows.  Needs Re(s) > -2: at and
    below that the moment diverges at the grid points.
    """
    z = as_complex(s)
    if not (isinstance(x, int) and 0 <= x <= N):
        raise DomainError(f"fixed point must satisfy 0 <= x <= N, got x={x!r}, N={N}")
    if N < 2:
        raise DomainError(f"sampled estimator needs N >= 2, got {N}")
    if z.real <= -2.0:
        raise DomainError(f"fixed-point moment needs Re(s) > -2, got {z.real:g}")
    grid = squares_grid(N)
    ln_norm = lgamma(N + 1) + lgamma(N)
    scale = _psi_prefactor(x, N, z)
    return _gibbs_moment(
        "psi_mc", grid, z, float(x * x), ln_norm, cfg, n_samples, scale, workers
    )


def ratio_mc(u, s, cfg: SamplerConfig, n_samples: int, workers: int = 1) -> MCEstimate:
    """Generalized Vandermonde ratio on any grid as a sampled moment.

    h_N(s) N^(s/2) E[ prod_k (X_k / u_k)^(s/2) ] equals the determinant ratio
    (see determinants.alternating_sum) on every positive grid, with X drawn
    from the interlacing law on u.
    """
    z = as_complex(s)
    grid = OrderedGrid.of(u)
    N = len(grid)
    if N < 2:
        raise DomainError(f"sampled estimator needs N >= 2, got {N}")
    ln_norm = float(np.log(grid.array()).sum())
    scale = h_factor(z, N) * complex(np.exp((z / 2.0) * log(float(N))))
    return _gibbs_moment("ratio_mc", grid, z, 0.0, ln_norm, cfg, n_samples, scale, workers)


def exp_moment_mc(u, s, cfg: SamplerConfig, n_samples: int, workers: int = 1) -> MCEstimate:
    """Moment of a weighted exponential sum matching the alternating expansion.

    E[(sum_n e_n / u_n)^(s/2)] = Gamma(1 + s/2) * alternating_sum(s, u) for
    independent standard exponentials e_n; finite for Re(s) > -2N, enforced
    with a 0.5 margin.
    """
    z = as_complex(s)
    grid = OrderedGrid.of(u)
    N = len(grid)
    if z.real < -2.0 * N + 0.5:
        raise DomainError(
            f"moment diverges: need Re(s) >= {-2.0 * N + 0.5:g} on {N} nodes, got {z.real:g}"
        )
    uu = grid.array()

    def chunk_sums(lo: int, count: int, eff: int) -> np.ndarray:
        out = np.empty(count, dtype=np.complex128)
        for i in range(count):
            gen = _rng.chunk_stream(cfg.seed, lo + i, _rng.TAG_EXPONENTIAL)
            expo = -np.log1p(-gen.random((eff, N)))
            total = (expo / uu).sum(axis=1)
            out[i] = np.exp((z / 2.0) * np.log(total)).sum()
        return out

    return _mc.run_chunked("exp_moment_mc", n_samples, cfg, chunk_sums, workers=workers)
