"""Deterministic per-chunk random streams.

Every Monte-Carlo routine consumes one independent counter-based stream per
(seed, estimator tag, chunk index).  Chunk results are merged in index order,
so values depend only on the configuration, never on scheduling or worker
count.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_MASK56 = (1 << 56) - 1

# estimator tags: streams of different estimators never collide under one seed
TAG_GIBBS = 0
TAG_REJECTION = 1
TAG_EXPONENTIAL = 2
TAG_ENSEMBLE = 3
TAG_ENSEMBLE_NESTED = 4


def chunk_stream(seed: int, index: int, tag: int = 0) -> np.random.Generator:
    """Philox stream keyed by (seed, tag byte | chunk index)."""
    if index < 0:
        raise ValueError(f"chunk index must be nonnegative, got {index}")
    key = np.array(
        [seed & _MASK64, ((tag & 0xFF) << 56) | (index & _MASK56)], dtype=np.uint64
    )
    return np.random.Generator(np.random.Philox(key=key))
