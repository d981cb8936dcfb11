"""Chunked Monte-Carlo driver with batch-means errors.

Work is split into fixed-size chunks, each with its own random stream; the
estimate is the scaled grand mean and the standard error comes from the
spread of per-chunk means (independent chains).  The effective chunk size is
capped at ceil(n/8) so at least eight batches exist whenever n >= 8, and the
sample count rounds up to whole chunks.  Both adjustments are deterministic
functions of (n, chunk), preserving the reproducibility key
(seed, n, chunk) regardless of worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import hypot, sqrt
from typing import Callable

import numpy as np

from .errors import DomainError

BLOCK_CHUNKS = 256


@dataclass(frozen=True)
class SamplerConfig:
    """Reproducibility key and chain layout for every sampler."""

    seed: int
    burn_in: int = 256
    thinning: int = 1
    chunk: int = 2048

    def __post_init__(self):
        if self.burn_in < 0 or self.thinning < 1 or self.chunk < 1:
            raise DomainError(f"invalid sampler configuration {self!r}")


@dataclass(frozen=True)
class MCEstimate:
    """Monte-Carlo estimate with batch-means standard error."""

    mean: complex
    std_error: float
    n_samples: int
    seed: int
    method: str


def effective_chunk(n: int, chunk: int) -> int:
    if n < 1:
        raise DomainError(f"need at least one sample, got {n}")
    return max(1, min(chunk, -(-n // 8)))


def run_chunked(
    method: str,
    n: int,
    cfg: SamplerConfig,
    chunk_sums: Callable[[int, int, int], np.ndarray],
    scale: complex = 1.0 + 0j,
    workers: int = 1,
    block: int = BLOCK_CHUNKS,
) -> MCEstimate:
    """Assemble an estimate from per-chunk sums.

    chunk_sums(first_index, count, chunk_size) must return the complex sums
    of `chunk_size` integrand values for `count` consecutive chunks, using
    only the streams keyed by those chunk indices.
    """
    eff = effective_chunk(n, cfg.chunk)
    n_chunks = -(-n // eff)
    blocks = [(lo, min(block, n_chunks - lo)) for lo in range(0, n_chunks, block)]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda t: chunk_sums(t[0], t[1], eff), blocks))
    else:
        parts = [chunk_sums(lo, cnt, eff) for lo, cnt in blocks]
    sums = np.concatenate([np.asarray(p, dtype=np.complex128) for p in parts])
    if sums.shape != (n_chunks,):
        raise DomainError(f"chunk sums shape {sums.shape}, expected ({n_chunks},)")
    means = np.complex128(scale) * (sums / eff)
    mean = complex(means.mean())
    if n_chunks >= 2:
        se = hypot(
            float(means.real.std(ddof=1)) / sqrt(n_chunks),
            float(means.imag.std(ddof=1)) / sqrt(n_chunks),
        )
    else:
        se = 0.0
    return MCEstimate(
        mean=mean,
        std_error=se,
        n_samples=n_chunks * eff,
        seed=cfg.seed,
        method=method,
    )
