"""Weighted alternating series for the alternating zeta function.

The level-N approximation is a finite alternating sum with exact rational
binomial weights:

    eta_N(s) = sum_{n=1}^{N} a_{n,N} * n^(-s),
    a_{n,N}  = (-1)^(n-1) * C(2N, N-n) / C(2N, N).

The weights sum to 1/2, reproduce eta exactly at s = 0, vanish against
n^(2k) for 1 <= k <= N-1, and converge to the classical alternating
coefficients (-1)^(n-1) as N grows.  Everything weight-related is exact
Fraction arithmetic; only the final dot product rounds.

Also here: the normalizing factor relating the nested-box integral to
eta_N (a partial product converging to 1/Gamma(1+s/2)), a partial-product
Gamma evaluator, and the high-precision reference oracle the whole package
is validated against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, isfinite
from typing import Literal, Mapping, Sequence

import mpmath
import numpy as np

from .errors import CapExceeded, DomainError, OracleUnstable, PoleError

WEIGHT_CAP = 512

Method = Literal["series", "determinant", "tridiag", "contfrac", "mc", "ensemble"]


@dataclass(frozen=True)
class SParam:
    """Point of evaluation s = re + im*i."""

    re: float
    im: float = 0.0

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def of(cls, s) -> "SParam":
        z = as_complex(s)
        return cls(z.real, z.imag)


def as_complex(s) -> complex:
    """Coerce SParam / real / complex to a plain complex."""
    if isinstance(s, SParam):
        return complex(s)
    z = complex(s)
    if not (isfinite(z.real) and isfinite(z.imag)):
        raise DomainError(f"s must be finite, got {s!r}")
    return z


@dataclass(frozen=True)
class WeightTable:
    """Exact weights a_{1,N} .. a_{N,N} of the level-N series."""

    N: int
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.weights) != self.N:
            raise DomainError(f"expected {self.N} weights, got {len(self.weights)}")

    def floats(self) -> tuple[float, ...]:
        return tuple(float(w) for w in self.weights)


@dataclass(frozen=True)
class EvalResult:
    """A single evaluation of the level-N approximation."""

    value: complex
    method: Method
    N: int
    meta: Mapping = field(default_factory=dict)


def _check_level(N: int, cap: int = WEIGHT_CAP) -> None:
    if not isinstance(N, int) or N < 1:
        raise DomainError(f"level N must be a positive integer, got {N!r}")
    if N > cap:
        raise CapExceeded(f"level N={N} exceeds cap {cap}")


def weights(N: int, cap: int = WEIGHT_CAP) -> WeightTable:
    """Exact binomial weights of the level-N series."""
    _check_level(N, cap)
    c0 = comb(2 * N, N)
    ws = tuple(
        Fraction((-1) ** (n - 1) * comb(2 * N, N - n), c0) for n in range(1, N + 1)
    )
    return WeightTable(N=N, weights=ws)


def weights_product_form(N: int, cap: int = WEIGHT_CAP) -> tuple[Fraction, ...]:
    """Same weights via the pairwise product (1/2) prod_{j!=n} j^2/(j^2-n^2).

    O(N^2) exact-rational work; kept as an independent cross-check of
    `weights`, which is the cheap primary form.
    """
    _check_level(N, cap)
    out = []
    for n in range(1, N + 1):
        w = Fraction(1, 2)
        for j in range(1, N + 1):
            if j != n:
                w *= Fraction(j * j, j * j - n * n)
        out.append(w)
    return tuple(out)


def abs_weight(n: int, N: int) -> Fraction:
    """|a_{n,N}| = N!^2 / ((N-n)! (N+n)!), by the factorial formula."""
    if not 1 <= n <= N:
        raise DomainError(f"need 1 <= n <= N, got n={n}, N={N}")
    return Fraction(factorial(N) ** 2, factorial(N - n) * factorial(N + n))


def eta_series(s, N: int, cap: int = WEIGHT_CAP) -> EvalResult:
    """Level-N weighted series, rounded exactly once per component.

    The powers n^(-s) are computed in double precision, converted exactly to
    rationals, and dotted with the exact weights; only the final totals round
    back to floats.  In particular s = 0 returns exactly 0.5.
    """
    z = as_complex(s)
    table = weights(N, cap)
    re_total = Fraction(0)
    im_total = Fraction(0)
    for n, w in enumerate(table.weights, start=1):
        p = complex(n) ** (-z) if n > 1 else complex(1.0)
        re_total += w * Fraction(p.real)
        if p.imag:
            im_total += w * Fraction(p.imag)
    return EvalResult(
        value=complex(float(re_total), float(im_total)), method="series", N=N
    )


def eta_series_exact(s: int, N: int, cap: int = WEIGHT_CAP) -> Fraction:
    """Exact rational value of the level-N series at integer s.

    For s <= 0 the powers n^(-s) are integers; for s > 0 they are exact
    reciprocals.  Either way the sum is a Fraction with no rounding at all.
    """
    if not isinstance(s, int):
        raise DomainError(f"exact evaluation needs integer s, got {s!r}")
    table = weights(N, cap)
    return sum(
        (w * Fraction(n) ** (-s) for n, w in enumerate(table.weights, start=1)),
        Fraction(0),
    )


def h_factor(s, N: int) -> complex:
    """Normalizer prod_{n=1}^{N-1} (1 + s/(2n)) / (1 + 1/n)^(s/2).

    Tends to 1/Gamma(1 + s/2) as N grows; equals 1 exactly (to the bit) at
    s = 0 and s = 2, and vanishes at s = -2k for k <= N-1.
    """
    z = as_complex(s)
    _check_level(N, cap=1 << 20)
    if N == 1:
        return complex(1.0)
    n = np.arange(1, N, dtype=np.float64)
    base = (1.0 + 1.0 / n).astype(np.complex128)
    num = (1.0 + z / (2.0 * n)).astype(np.complex128)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(num) - (z / 2.0) * np.log(base)
        total = logs.sum()
        return complex(np.exp(total))


def gamma_product_partial(z, M: int) -> complex:
    """Partial product (1/z) prod_{n=1}^{M} (1 + 1/n)^z / (1 + z/n) -> Gamma(z).

    Truncation error is O((z^2 - z) / M); exactly 1 at z = 1 for every M.
    """
    zc = as_complex(z)
    if zc.imag == 0 and zc.real <= 0 and zc.real == int(zc.real):
        raise PoleError(f"Gamma pole at z = {zc.real:g}")
    if not isinstance(M, int) or M < 1:
        raise DomainError(f"M must be a positive integer, got {M!r}")
    n = np.arange(1, M + 1, dtype=np.float64)
    base = (1.0 + 1.0 / n).astype(np.complex128)
    denom = (1.0 + zc / n).astype(np.complex128)
    with np.errstate(divide="ignore", invalid="ignore"):
        total = (zc * np.log(base) - np.log(denom)).sum() - np.log(complex(zc))
        return complex(np.exp(total))


def euler_accelerated_eta(x: float, start: int = 12, levels: int = 28) -> float:
    """Alternating partial sums accelerated by repeated averaging; real x > 0.

    Independent double-precision route used to gate the reference oracle.
    """
    if not x > 0:
        raise DomainError(f"acceleration route requires real s > 0, got {x!r}")
    m_max = start + levels
    terms = [(-1) ** (n - 1) * n ** (-x) for n in range(1, m_max + 1)]
    sums = list(np.cumsum(terms)[start - 1 :])
    for _ in range(levels):
        sums = [(a + b) / 2.0 for a, b in zip(sums, sums[1:])]
    return float(sums[0])


def eta_reference(s, tol: float = 1e-12) -> complex:
    """High-precision reference value of the alternating zeta function.

    Evaluated at two working precisions which must agree to `tol`
    (relative); for real s > 0 an independent double-precision accelerated
    sum must agree to 1e-10.  Any mismatch raises OracleUnstable.
    """
    z = as_complex(s)
    with mpmath.workdps(30):
        lo = mpmath.altzeta(mpmath.mpc(z.real, z.imag))
        lo_c = complex(lo)
    with mpmath.workdps(50):
        hi = mpmath.altzeta(mpmath.mpc(z.real, z.imag))
        hi_c = complex(hi)
    scale = max(1.0, abs(hi_c))
    if abs(lo_c - hi_c) > tol * scale:
        raise OracleUnstable(
            f"precision doubling moved eta({z}) by {abs(lo_c - hi_c):.3e}"
        )
    if z.imag == 0 and z.real > 0:
        alt = euler_accelerated_eta(z.real)
        if abs(alt - hi_c.real) > 1e-10 * scale:
            raise OracleUnstable(
                f"accelerated-sum cross-check differs by {abs(alt - hi_c.real):.3e}"
            )
    return hi_c
