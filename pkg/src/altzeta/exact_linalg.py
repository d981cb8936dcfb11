"""Exact rational linear algebra on small structured matrices.

Everything here runs in `fractions.Fraction` arithmetic: Vandermonde
determinants and inverses, Lagrange interpolation, partial fractions, and
rank-one perturbations of diagonal matrices.  These are the exact anchors the
floating-point evaluators are tested against.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .errors import (
    ArityError,
    CapExceeded,
    DegenerateNodes,
    DegreeError,
    SingularMatrix,
    ZeroLambda,
    ZeroNode,
)

Rational = Fraction

BRUTE_FORCE_CAP = 7


def as_nodes(nodes: Sequence) -> tuple[Fraction, ...]:
    """Coerce to a tuple of pairwise-distinct Fractions."""
    out = tuple(Fraction(x) for x in nodes)
    if len(set(out)) != len(out):
        raise DegenerateNodes(f"nodes must be pairwise distinct, got {nodes!r}")
    return out


def squares_nodes(N: int) -> tuple[Fraction, ...]:
    """The grid 1, 4, ..., N^2."""
    if N < 1:
        raise ArityError("N must be >= 1")
    return tuple(Fraction(n * n) for n in range(1, N + 1))


def vandermonde_matrix(nodes: Sequence) -> list[list[Fraction]]:
    """Row n holds powers x_n^0, x_n^1, ..., x_n^(N-1)."""
    xs = as_nodes(nodes)
    return [[x**k for k in range(len(xs))] for x in xs]


def vandermonde_det(nodes: Sequence) -> Fraction:
    """prod_{i<j} (x_j - x_i)."""
    xs = as_nodes(nodes)
    out = Fraction(1)
    for j in range(len(xs)):
        for i in range(j):
            out *= xs[j] - xs[i]
    return out


def squares_vandermonde_det(N: int) -> Fraction:
    """Determinant of the Vandermonde on 1, 4, ..., N^2 in closed form.

    Equals prod_{i<j} (j^2 - i^2) = (1/N!) * prod_{n=1}^{N-1} (2n+1)!.
    """
    out = Fraction(1, factorial(N))
    for n in range(1, N):
        out *= factorial(2 * n + 1)
    return out


def det_bruteforce(matrix: Sequence[Sequence], cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """Cofactor-expansion determinant, exact.  Oracle only: O(n!) work."""
    n = len(matrix)
    if n > cap:
        raise CapExceeded(f"brute-force determinant capped at {cap}x{cap}, got {n}")
    rows = [[Fraction(v) for v in row] for row in matrix]
    if any(len(row) != n for row in rows):
        raise ArityError("matrix must be square")

    def expand(rs: list[list[Fraction]]) -> Fraction:
        m = len(rs)
        if m == 1:
            return rs[0][0]
        total = Fraction(0)
        sign = 1
        for j in range(m):
            if rs[0][j]:
                minor = [row[:j] + row[j + 1 :] for row in rs[1:]]
                total += sign * rs[0][j] * expand(minor)
            sign = -sign
        return total

    return expand(rows)


def lagrange_basis_coeffs(nodes: Sequence, m: int) -> list[Fraction]:
    """Coefficients (ascending) of the basis polynomial that is 1 at node m, 0 elsewhere."""
    xs = as_nodes(nodes)
    if not 0 <= m < len(xs):
        raise ArityError(f"basis index {m} out of range for {len(xs)} nodes")
    coeffs = [Fraction(1)]
    denom = Fraction(1)
    for j, x in enumerate(xs):
        if j == m:
            continue
        # multiply by (t - x_j)
        coeffs = [Fraction(0)] + coeffs
        for k in range(len(coeffs) - 1):
            coeffs[k] -= x * coeffs[k + 1]
        denom *= xs[m] - x
    return [c / denom for c in coeffs]


def vandermonde_inverse(nodes: Sequence) -> list[list[Fraction]]:
    """Exact inverse of the power-basis Vandermonde; column m holds basis-m coefficients."""
    xs = as_nodes(nodes)
    n = len(xs)
    cols = [lagrange_basis_coeffs(xs, m) for m in range(n)]
    return [[cols[m][k] for m in range(n)] for k in range(n)]


def vandermonde_inverse_first_row(nodes: Sequence) -> tuple[Fraction, ...]:
    """First row of the inverse Vandermonde: entry m is prod_{j!=m} x_j / (x_j - x_m).

    Nodes must be nonzero; on the squared-integer grid these entries are twice
    the alternating-series weights.
    """
    xs = as_nodes(nodes)
    if any(x == 0 for x in xs):
        raise ZeroNode("first-row formula requires nonzero nodes")
    out = []
    for m, xm in enumerate(xs):
        v = Fraction(1)
        for j, xj in enumerate(xs):
            if j != m:
                v *= xj / (xj - xm)
        out.append(v)
    return tuple(out)


def lagrange_interpolate(nodes: Sequence, values: Sequence, x) -> Fraction:
    """Value at x of the unique interpolant through (node, value) pairs."""
    xs = as_nodes(nodes)
    ys = [Fraction(v) for v in values]
    if len(ys) != len(xs):
        raise ArityError(f"{len(xs)} nodes but {len(ys)} values")
    xf = Fraction(x)
    total = Fraction(0)
    for m, xm in enumerate(xs):
        term = ys[m]
        for j, xj in enumerate(xs):
            if j != m:
                term *= (xf - xj) / (xm - xj)
        total += term
    return total


def poly_eval(coeffs: Sequence, x) -> Fraction:
    """Horner evaluation; coefficients ascending."""
    xf = Fraction(x)
    total = Fraction(0)
    for c in reversed([Fraction(c) for c in coeffs]):
        total = total * xf + c
    return total


def poly_mul(a: Sequence, b: Sequence) -> list[Fraction]:
    """Product of two coefficient sequences (ascending)."""
    af = [Fraction(c) for c in a]
    bf = [Fraction(c) for c in b]
    out = [Fraction(0)] * (len(af) + len(bf) - 1)
    for i, ai in enumerate(af):
        if ai:
            for j, bj in enumerate(bf):
                out[i + j] += ai * bj
    return out


def partial_fraction_coeffs(numer: Sequence, nodes: Sequence) -> tuple[Fraction, ...]:
    """Residues c_m of P(x) / prod_j (x - x_j) = sum_m c_m / (x - x_m).

    Requires deg P < number of nodes (proper rational function).
    """
    xs = as_nodes(nodes)
    cs = [Fraction(c) for c in numer]
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) > len(xs):
        raise DegreeError(f"numerator degree {len(cs) - 1} >= node count {len(xs)}")
    out = []
    for m, xm in enumerate(xs):
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != m:
                denom *= xm - xj
        out.append(poly_eval(cs, xm) / denom)
    return tuple(out)


def rank_one_matrix(lambdas: Sequence) -> list[list[Fraction]]:
    """diag(lambda) plus the all-ones matrix."""
    ls = [Fraction(v) for v in lambdas]
    n = len(ls)
    return [[ls[i] + 1 if i == j else Fraction(1) for j in range(n)] for i in range(n)]


def rank_one_perturbed_det(lambdas: Sequence) -> Fraction:
    """det(diag(lambda) + ones) = (prod lambda) * (1 + sum 1/lambda)."""
    ls = [Fraction(v) for v in lambdas]
    if any(v == 0 for v in ls):
        raise ZeroLambda("diagonal entries must be nonzero")
    prod = Fraction(1)
    inv_sum = Fraction(0)
    for v in ls:
        prod *= v
        inv_sum += 1 / v
    return prod * (1 + inv_sum)


def rank_one_perturbed_inverse(lambdas: Sequence) -> list[list[Fraction]]:
    """Sherman-Morrison inverse of diag(lambda) + ones."""
    ls = [Fraction(v) for v in lambdas]
    if any(v == 0 for v in ls):
        raise ZeroLambda("diagonal entries must be nonzero")
    denom = 1 + sum(1 / v for v in ls)
    if denom == 0:
        raise SingularMatrix("rank-one update is singular: 1 + sum 1/lambda = 0")
    n = len(ls)
    return [
        [
            (Fraction(1, 1) / ls[i] if i == j else Fraction(0))
            - 1 / (ls[i] * ls[j] * denom)
            for j in range(n)
        ]
        for i in range(n)
    ]


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact matrix product (for invariant checks)."""
    if any(len(row) != len(B) for row in A):
        raise ArityError("inner dimensions disagree")
    return [
        [sum((Fraction(a) * Fraction(b) for a, b in zip(row, col)), Fraction(0)) for col in zip(*B)]
        for row in A
    ]


def mat_identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
