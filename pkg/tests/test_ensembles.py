"""Ordered Beta/Gamma ensembles, their normalizations, and averaged ratios.

Closed forms are pinned against direct quadrature of the defining cube
integrals; Metropolis moments against exact or quadrature targets with
autocorrelation-adjusted error bars.
"""

from math import exp, log, sqrt

import numpy as np
import pytest
from scipy import integrate
from scipy.special import beta as beta_fn

from altzeta import ensembles as en
from altzeta._mc import SamplerConfig
from altzeta.errors import DomainError

JAC = en.EnsembleSpec.jacobi
LAG = en.EnsembleSpec.laguerre


def mcmc_se(series: np.ndarray, iact: float) -> float:
    return float(series.std(ddof=1)) / sqrt(len(series) / max(iact, 1.0))


# ---------------------------------------------------------------------------
# spec validation


def test_spec_rejects_bad_parameters():
    with pytest.raises(DomainError):
        en.EnsembleSpec(kind="hermite", N=2, a=1.0, b=1.0)
    with pytest.raises(DomainError):
        JAC(0, 1.0, 1.0)
    with pytest.raises(DomainError):
        JAC(en.ENSEMBLE_CAP + 1, 1.0, 1.0)
    with pytest.raises(DomainError):
        JAC(2, -1.0, 1.0)
    with pytest.raises(DomainError):
        en.EnsembleSpec(kind="jacobi", N=2, a=1.0)  # missing b
    with pytest.raises(DomainError):
        en.EnsembleSpec(kind="jacobi", N=2, a=1.0, b=1.0, theta=2.0)
    with pytest.raises(DomainError):
        en.EnsembleSpec(kind="laguerre", N=2, a=1.0)  # missing theta
    with pytest.raises(DomainError):
        en.EnsembleSpec(kind="laguerre", N=2, a=1.0, b=1.0, theta=2.0)


# ---------------------------------------------------------------------------
# cube normalizations


def test_beta_normalization_single_point_is_beta_function():
    assert en.selberg_value(1, 3.0, 2.0) == pytest.approx(beta_fn(3.0, 2.0), rel=1e-14)


def test_beta_normalization_flat_pair():
    # int over the unit square of (x - y)^2 is 1/6
    assert en.selberg_value(2, 1.0, 1.0) == pytest.approx(1.0 / 6.0, rel=1e-13)


def test_beta_normalization_matches_quadrature():
    want, _ = integrate.dblquad(
        lambda x, y: (x - y) ** 2 * (x * y) * ((1 - x) * (1 - y)) ** 2, 0, 1, 0, 1
    )
    assert en.selberg_value(2, 2.0, 3.0) == pytest.approx(want, rel=1e-8)


def test_gamma_normalization_single_point():
    # int u^(a-1) e^(-u/theta) = theta^a Gamma(a)
    assert en.laguerre_norm(1, 3.0, 2.0) == pytest.approx(2.0**3 * 2.0, rel=1e-14)


def test_gamma_normalization_matches_quadrature():
    want, _ = integrate.dblquad(
        lambda x, y: (x - y) ** 2 * (x * y) ** 2 * np.exp(-(x + y)), 0, 60, 0, 60
    )
    assert en.laguerre_norm(2, 3.0, 1.0) == pytest.approx(want, rel=1e-8)
    assert en.laguerre_norm(2, 3.0, 1.0) == pytest.approx(24.0, rel=1e-13)


def test_gamma_normalization_scale_doubling():
    for N, a in ((1, 2.0), (2, 3.0), (3, 1.5)):
        ratio = en.laguerre_norm(N, a, 2.0) / en.laguerre_norm(N, a, 1.0)
        assert ratio == pytest.approx(2.0 ** (N * (a + N - 1)), rel=1e-12)


def test_beta_to_gamma_limit():
    # substituting u = v/L with second exponent L+1 rescales the Beta
    # normalization onto the Gamma one; the gap shrinks like 1/L
    N, a = 2, 3.0
    want = en.laguerre_norm(N, a, 1.0)
    gaps = []
    for L in (1e2, 1e3, 1e4):
        got = en.selberg_value(N, a, L + 1.0) * L ** (N * (a + N - 1))
        gaps.append(abs(got - want) / want)
    assert gaps[0] > gaps[1] > gaps[2]
    got = en.selberg_value(N, a, 1e6 + 1.0) * 1e6 ** (N * (a + N - 1))
    assert abs(got - want) / want < 1e-3


def test_normalization_rejects_bad_parameters():
    with pytest.raises(DomainError):
        en.selberg_value(0, 1.0, 1.0)
    with pytest.raises(DomainError):
        en.selberg_value(2, 0.0, 1.0)
    with pytest.raises(DomainError):
        en.laguerre_norm(2, 1.0, 0.0)


# ---------------------------------------------------------------------------
# density


def test_density_single_point_flat_is_uniform():
    d = en.density_eval(JAC(1, 1.0, 1.0), (0.37,))
    assert d.in_support and d.log_density == pytest.approx(0.0, abs=1e-14)


def test_density_single_point_gamma_is_exponential():
    spec = LAG(1, 1.0, 2.0)
    d = en.density_eval(spec, (1.3,))
    assert d.log_density == pytest.approx(-log(2.0) - 1.3 / 2.0, rel=1e-13)


def test_density_off_support():
    assert not en.density_eval(JAC(2, 1.0, 1.0), (0.8, 0.3)).in_support  # unordered
    assert not en.density_eval(JAC(2, 1.0, 1.0), (0.3, 1.2)).in_support  # beyond 1
    assert not en.density_eval(LAG(2, 1.0, 1.0), (-0.5, 1.0)).in_support
    with pytest.raises(DomainError):
        en.density_eval(JAC(2, 1.0, 1.0), (0.3,))  # arity


@pytest.mark.parametrize("spec", [JAC(1, 2.0, 3.0), LAG(1, 2.0, 1.5)])
def test_density_normalized_single_point(spec):
    hi = 1.0 if spec.kind == "jacobi" else 60.0
    val, _ = integrate.quad(
        lambda u: exp(en.density_eval(spec, (u,)).log_density), 0.0, hi
    )
    assert val == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("spec", [JAC(2, 3.0, 2.0), LAG(2, 2.0, 1.0)])
def test_density_normalized_pair(spec):
    hi = 1.0 if spec.kind == "jacobi" else 50.0
    val, _ = integrate.dblquad(
        lambda u2, u1: exp(en.density_eval(spec, (u1, u2)).log_density),
        0.0,
        hi,
        lambda u1: u1,
        hi,
    )
    assert val == pytest.approx(1.0, rel=1e-6)


def test_interlaced_marginal_is_beta():
    # drawing a pair from the ordered Beta ensemble and one interlaced point
    # between them: the interlaced point is Beta(a+1, b+1) distributed
    a, b = 3.0, 2.0
    Z = en.selberg_value(2, a, b)
    g = lambda u: u ** (a - 1) * (1 - u) ** (b - 1)

    def marginal(x: float) -> float:
        inner = lambda u1: g(u1) * integrate.quad(
            lambda u2: g(u2) * (u2 - u1), x, 1.0
        )[0]
        return 2.0 / Z * integrate.quad(inner, 0.0, x)[0]

    for x in (0.2, 0.5, 0.8):
        want = x**a * (1 - x) ** b / beta_fn(a + 1.0, b + 1.0)
        assert marginal(x) == pytest.approx(want, abs=1e-6)


# ---------------------------------------------------------------------------
# Metropolis sampler


def test_chain_single_point_flat_is_uniform(cfg):
    xs, diags = en.sample_ensemble(JAC(1, 1.0, 1.0), cfg, 10000)
    u = np.sort(xs[:, 0])
    n = len(u)
    ks = float(np.abs(u - (np.arange(1, n + 1) - 0.5) / n).max()) + 0.5 / n
    assert ks < 1.628 / sqrt(n / max(diags["iact"], 1.0))


def test_chain_respects_ordering_and_support(cfg):
    xs, _ = en.sample_ensemble(JAC(3, 2.0, 2.0), cfg, 2000)
    assert np.all(xs > 0) and np.all(xs < 1)
    assert np.all(np.diff(xs, axis=1) > 0)
    ys, _ = en.sample_ensemble(LAG(3, 2.0, 1.0), cfg, 2000)
    assert np.all(ys > 0) and np.all(np.diff(ys, axis=1) > 0)


def test_chain_pair_sum_flat_beta(cfg):
    # E[u1 + u2] = 1 for the flat pair ensemble, by u -> 1-u symmetry
    xs, diags = en.sample_ensemble(JAC(2, 1.0, 1.0), cfg, 40000)
    sums = xs.sum(axis=1)
    assert abs(sums.mean() - 1.0) < 4.0 * mcmc_se(sums, diags["iact"])


def test_chain_pair_sum_gamma(cfg):
    # E[u1 + u2] = 2(a+1) theta: the normalization scales as theta^(2(a+1))
    xs, diags = en.sample_ensemble(LAG(2, 3.0, 1.0), cfg, 40000)
    sums = xs.sum(axis=1)
    assert abs(sums.mean() - 8.0) < 4.0 * mcmc_se(sums, diags["iact"])


def test_chain_diagnostics_reported(cfg):
    _, diags = en.sample_ensemble(JAC(2, 2.0, 2.0), cfg, 4000)
    assert set(diags) == {"acceptance_rate", "step_size", "iact", "n_chains"}
    assert 0.0 < diags["acceptance_rate"] <= 1.0
    assert diags["step_size"] > 0 and diags["iact"] >= 1.0


def test_chain_reproducible(cfg):
    a, _ = en.sample_ensemble(JAC(2, 2.0, 2.0), cfg, 4000)
    b, _ = en.sample_ensemble(JAC(2, 2.0, 2.0), cfg, 4000)
    assert np.array_equal(a, b)


def test_ensemble_iterator_matches_array(cfg):
    from itertools import islice

    spec = JAC(2, 2.0, 2.0)
    grids = list(islice(en.iter_ensemble(spec, cfg), 5))
    assert all(len(g) == 2 for g in grids)
    assert all(0 < g.u[0] < g.u[1] < 1 for g in grids)


# ---------------------------------------------------------------------------
# averaged ratio: closed form vs quadrature vs sampling


def test_avg_ratio_closed_is_one_at_origin():
    assert en.avg_ratio_closed(JAC(2, 3.0, 2.0), 0.0) == pytest.approx(1.0, rel=1e-14)
    assert en.avg_ratio_closed(LAG(2, 3.0, 1.0), 0.0) == pytest.approx(1.0, rel=1e-14)


def test_avg_ratio_closed_single_point_is_beta_moment():
    # N = 1: E[U^(-s/2)] = B(a - s/2, b) / B(a, b)
    a, b, s = 3.0, 2.0, 2.0
    want = beta_fn(a - s / 2.0, b) / beta_fn(a, b)
    assert en.avg_ratio_closed(JAC(1, a, b), s) == pytest.approx(want, rel=1e-13)


def test_avg_ratio_closed_worked_pair_value():
    assert en.avg_ratio_closed(JAC(2, 3.0, 2.0), 2.0) == pytest.approx(5.0, rel=1e-12)


def test_avg_ratio_closed_pole_guard():
    with pytest.raises(DomainError):
        en.avg_ratio_closed(JAC(2, 1.0, 2.0), 2.0)  # a - s/2 = 0


@pytest.mark.parametrize(
    "spec,s",
    [
        (JAC(1, 3.0, 2.0), 2.0),
        (JAC(2, 3.0, 2.0), 1.0),
        (JAC(3, 3.0, 2.0), 1.0),
        (LAG(2, 3.0, 1.0), 1.0),
        (JAC(2, 3.0, 2.0), 1.0 + 1.0j),
    ],
)
def test_weighted_integral_matches_norm_times_closed(spec, s):
    got = en.weighted_ratio_integral_quadrature(spec, s)
    want = (
        en.selberg_value(spec.N, spec.a, spec.b)
        if spec.kind == "jacobi"
        else en.laguerre_norm(spec.N, spec.a, spec.theta)
    ) * en.avg_ratio_closed(spec, s)
    assert got == pytest.approx(want, rel=1e-5)


def test_weighted_integral_single_point_anchor():
    # N = 1 reduces to B(a - s/2, b) itself
    got = en.weighted_ratio_integral_quadrature(JAC(1, 3.0, 2.0), 2.0)
    assert got == pytest.approx(beta_fn(2.0, 2.0), rel=1e-8)


def test_weighted_integral_level_cap():
    with pytest.raises(DomainError):
        en.weighted_ratio_integral_quadrature(JAC(4, 3.0, 2.0), 1.0)


def test_weighted_integral_pole_rejected():
    with pytest.raises(DomainError):
        en.weighted_ratio_integral_quadrature(JAC(1, 1.0, 1.0), 2.0)


def test_avg_ratio_quadrature_route():
    spec = JAC(2, 3.0, 2.0)
    got = en.avg_ratio_quadrature(spec, 2.0)
    assert got == pytest.approx(5.0, rel=1e-6)


def test_avg_ratio_sampled_routes_agree_with_closed(cfg):
    spec = JAC(2, 3.0, 2.0)
    want = en.avg_ratio_closed(spec, 2.0)
    r1, r2 = en.avg_ratio_mc(spec, 2.0, cfg, 40000)
    assert abs(r1.mean - want) < 4.0 * r1.std_error
    assert abs(r2.mean - want) < 4.0 * r2.std_error
    assert abs(r1.mean - r2.mean) < 4.0 * sqrt(r1.std_error**2 + r2.std_error**2)
    assert r1.method == "avg_ratio_mc:expansion"
    assert r2.method == "avg_ratio_mc:nested"


def test_avg_ratio_sampled_gamma_weight(cfg):
    spec = LAG(2, 3.0, 1.0)
    want = en.avg_ratio_closed(spec, 1.0)
    r1, r2 = en.avg_ratio_mc(spec, 1.0, cfg, 40000)
    assert abs(r1.mean - want) < 4.0 * r1.std_error
    assert abs(r2.mean - want) < 4.0 * r2.std_error


def test_avg_ratio_sampled_zero_variance_at_origin(cfg):
    r1, r2 = en.avg_ratio_mc(JAC(2, 3.0, 2.0), 0.0, cfg, 4000)
    assert r1.mean == 1.0 + 0j and r1.std_error == 0.0
    assert r2.mean == 1.0 + 0j and r2.std_error == 0.0


def test_avg_ratio_sampled_pole_guard(cfg):
    with pytest.raises(DomainError):
        en.avg_ratio_mc(JAC(2, 1.0, 2.0), 2.0, cfg, 100)
