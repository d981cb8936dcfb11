# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gibbs sweeps for the interlacing conditional law.

Must stay bit-identical to altzeta._gibbs_np: same uniform consumption order,
same Gauss-Legendre CDF evaluation in ascending index order, fixed
52-iteration bisection, no fused multiply-add (built with -ffp-contract=off).
"""

import numpy as np

from libc.math cimport fabs


cdef inline double _cdf(const double* x, int K, int k, double a, double t,
                        const double* nodes, const double* wts, int m) noexcept nogil:
    cdef double span = t - a
    cdef double tot = 0.0
    cdef double y, acc
    cdef int i, j
    for i in range(m):
        y = a + span * nodes[i]
        acc = 1.0
        for j in range(K):
            if j != k:
                acc = acc * fabs(y - x[j])
        tot = tot + wts[i] * acc
    return span * tot


def gibbs_chunks(double[:, ::1] u, double[:, :, ::1] uniforms, long keep,
                 long burn_in, long thinning, double[::1] nodes, double[::1] wts):
    """Run per-lane Gibbs chains; u: (L, N), uniforms: (L, sweeps, K) -> (L, keep, K)."""
    cdef long L = uniforms.shape[0]
    cdef long sweeps = uniforms.shape[1]
    cdef int K = <int> uniforms.shape[2]
    cdef int m = <int> nodes.shape[0]
    if u.shape[0] != L or u.shape[1] != K + 1:
        raise ValueError("grid shape does not match lanes")
    if sweeps != burn_in + keep * thinning:
        raise ValueError("sweep count disagrees with burn-in/keep/thinning")
    out_arr = np.empty((L, keep, K), dtype=np.float64)
    x_arr = np.empty(K, dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double[::1] x = x_arr
    cdef long l, t, kept
    cdef int k, it
    cdef double a, b, total, target, lo, hi, mid
    with nogil:
        for l in range(L):
            for k in range(K):
                x[k] = 0.5 * (u[l, k] + u[l, k + 1])
            kept = 0
            for t in range(sweeps):
                for k in range(K):
                    a = u[l, k]
                    b = u[l, k + 1]
                    total = _cdf(&x[0], K, k, a, b, &nodes[0], &wts[0], m)
                    target = uniforms[l, t, k] * total
                    lo = a
                    hi = b
                    for it in range(52):
                        mid = 0.5 * (lo + hi)
                        if _cdf(&x[0], K, k, a, mid, &nodes[0], &wts[0], m) < target:
                            lo = mid
                        else:
                            hi = mid
                    x[k] = 0.5 * (lo + hi)
                if t >= burn_in and (t - burn_in) % thinning == 0:
                    for k in range(K):
                        out[l, kept, k] = x[k]
                    kept = kept + 1
    return out_arr
