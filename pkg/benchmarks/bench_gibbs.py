"""Timing harness for the interlaced Gibbs kernel across backends.

Runs the same seeded workload through the compiled extension and the
interpreted fallback, verifies the outputs are bitwise identical, and prints
a small table of draw throughput.  Usage:

    python benchmarks/bench_gibbs.py [--samples 50000] [--levels 3,6,12]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from altzeta import available_backends, squares_grid
from altzeta._mc import SamplerConfig
from altzeta.sampling import gibbs_sample_array


def bench(N: int, n: int, cfg: SamplerConfig, force: str) -> tuple[float, np.ndarray]:
    gibbs_sample_array(squares_grid(min(N, 3)), cfg, 64, force=force)  # warm up
    t0 = time.perf_counter()
    out = gibbs_sample_array(squares_grid(N), cfg, n, force=force)
    return time.perf_counter() - t0, out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=float, default=50_000)
    ap.add_argument("--levels", default="3,6,12")
    ap.add_argument("--seed", type=int, default=20240)
    args = ap.parse_args()
    n = int(args.samples)
    levels = [int(v) for v in args.levels.split(",")]
    cfg = SamplerConfig(seed=args.seed, burn_in=128, thinning=1, chunk=2048)
    backends = available_backends()
    print(f"backends: {', '.join(backends)};  samples per level: {n}")
    header = f"{'N':>4}  {'numpy s':>10}  {'cython s':>10}  {'speedup':>8}  bitwise"
    print(header)
    print("-" * len(header))
    for N in levels:
        t_np, out_np = bench(N, n, cfg, "numpy")
        if "cython" in backends:
            t_cy, out_cy = bench(N, n, cfg, "cython")
            same = bool(np.array_equal(out_np, out_cy))
            print(f"{N:>4}  {t_np:>10.3f}  {t_cy:>10.3f}  {t_np / t_cy:>8.1f}  {same}")
            if not same:
                return 1
        else:
            print(f"{N:>4}  {t_np:>10.3f}  {'-':>10}  {'-':>8}  -")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
