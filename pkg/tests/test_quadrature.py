"""Adaptive Gauss-Legendre helper: smooth, oscillatory, and endpoint cases."""

from math import cos, exp, gamma, pi, sin

import numpy as np
import pytest

from altzeta import _quad
from altzeta.errors import QuadratureError


def test_polynomial_exact():
    got = _quad.adaptive_gl(lambda x: x**2, 0.0, 1.0)
    assert got == pytest.approx(1.0 / 3.0, rel=1e-13)


def test_sine_arch():
    got = _quad.adaptive_gl(np.sin, 0.0, pi)
    assert got == pytest.approx(2.0, rel=1e-12)


def test_oscillatory():
    # int_0^10 cos(7x) dx = sin(70)/7
    got = _quad.adaptive_gl(lambda x: np.cos(7.0 * x), 0.0, 10.0, rtol=1e-12)
    assert got == pytest.approx(sin(70.0) / 7.0, abs=1e-11)


def test_complex_valued_integrand():
    # int_0^1 e^(ix) dx = (e^i - 1)/i
    got = _quad.adaptive_gl(lambda x: np.exp(1j * x), 0.0, 1.0, rtol=1e-12)
    want = (np.exp(1j) - 1.0) / 1j
    assert got == pytest.approx(want, abs=1e-12)


def test_left_endpoint_singularity_power_map():
    # int_0^1 x^(-1/2) dx = 2, exponent c = 1/2
    g = _quad.with_left_power_map(lambda x: x**-0.5, 0.0, 1.0, 0.5)
    got = _quad.adaptive_gl(g, 0.0, 1.0, rtol=1e-11)
    assert got == pytest.approx(2.0, rel=1e-10)


def test_right_endpoint_singularity_power_map():
    # int_0^1 (1-x)^(-1/3) dx = 3/2
    g = _quad.with_right_power_map(lambda x: (1.0 - x) ** (-1.0 / 3.0), 0.0, 1.0, 2.0 / 3.0)
    got = _quad.adaptive_gl(g, 0.0, 1.0, rtol=1e-11)
    assert got == pytest.approx(1.5, rel=1e-9)


def test_integrate_weighted_beta_integral():
    # B(1/2, 3/4) with integrable singularities at both ends.  rtol stops at
    # 1e-9: tighter budgets force the refiner into the zone where 1 - x is
    # quantized to ulp multiples and f evaluates as a staircase.
    got = _quad.integrate_weighted(
        lambda x: x**-0.5 * (1.0 - x) ** -0.25, 0.0, 1.0, c_left=0.5, c_right=0.75,
        rtol=1e-9,
    )
    want = gamma(0.5) * gamma(0.75) / gamma(1.25)
    assert got == pytest.approx(want, rel=1e-8)


def test_integrate_weighted_smooth_case():
    got = _quad.integrate_weighted(lambda x: np.exp(-x), 0.0, 5.0, rtol=1e-11)
    assert got == pytest.approx(1.0 - exp(-5.0), rel=1e-10)


def test_integrate_weighted_rejects_bad_exponents():
    with pytest.raises(QuadratureError):
        _quad.integrate_weighted(lambda x: x, 0.0, 1.0, c_left=0.0)


def test_nonintegrable_singularity_raises():
    with pytest.raises(QuadratureError):
        _quad.adaptive_gl(lambda x: 1.0 / x, 1e-300, 1.0, rtol=1e-10)


def test_scalarized_matches_vectorized():
    f = _quad.scalarized(lambda x: cos(x) * x)
    got = _quad.adaptive_gl(f, 0.0, 2.0)
    want = _quad.adaptive_gl(lambda x: np.cos(x) * x, 0.0, 2.0)
    assert got == pytest.approx(want, rel=1e-12)
