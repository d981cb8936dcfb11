"""Shared test fixtures and small assertion helpers."""

from __future__ import annotations

import numpy as np
import pytest

from altzeta import MCEstimate, SamplerConfig


@pytest.fixture
def cfg() -> SamplerConfig:
    return SamplerConfig(seed=9001, burn_in=256, thinning=1, chunk=2048)


@pytest.fixture
def fast_cfg() -> SamplerConfig:
    return SamplerConfig(seed=9001, burn_in=64, thinning=1, chunk=512)


def assert_within_se(est: MCEstimate, want: complex, k: float = 4.0, floor: float = 0.0):
    """Assert |mean - want| <= k * std_error (plus an absolute floor)."""
    gap = abs(est.mean - complex(want))
    bound = k * est.std_error + floor
    assert gap <= bound, (
        f"{est.method}: gap {gap:.6g} exceeds {k} SE = {bound:.6g} "
        f"(mean {est.mean}, target {want}, n {est.n_samples})"
    )


def ks_two_sample_threshold(n: int, m: int, coeff: float = 1.628) -> float:
    """1% critical value of the two-sample Kolmogorov-Smirnov statistic."""
    return coeff * np.sqrt((n + m) / (n * m))
