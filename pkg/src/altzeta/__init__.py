"""Finite alternating-zeta evaluators with cross-validating routes.

The level-N series eta_N(s) = sum_{n<=N} a_{n,N} n^{-s} (signed binomial
weights summing to 1/2) converges to the alternating zeta function on the
whole complex plane and is exact at s = 0 and the first even negative
integers.  This package evaluates it along independent routes -- exact
rational arithmetic, determinants, a three-term recurrence and its continued
fraction, interlaced-sampling moments, and ensemble-averaged determinant
ratios -- and ships a self-check suite that plays the routes against each
other.

Hot sampling kernels run through a compiled extension when it is built and
fall back to a bit-identical interpreted implementation otherwise; see
altzeta._backend.
"""

__version__ = "0.1.0"

from ._backend import available_backends, backend_name
from ._mc import MCEstimate, SamplerConfig
from .determinants import (
    OrderedGrid,
    alternating_sum,
    detVs_integral_quadrature,
    eta_contfrac,
    eta_det,
    eta_tridiag,
    gen_vandermonde_ratio,
    squares_grid,
    tridiag_coeffs,
    tridiag_recurrence,
)
from .ensembles import (
    EnsembleSpec,
    avg_ratio_closed,
    avg_ratio_mc,
    avg_ratio_quadrature,
    weighted_ratio_integral_quadrature,
    density_eval,
    iter_ensemble,
    laguerre_norm,
    sample_ensemble,
    selberg_value,
)
from .errors import (
    AltzetaError,
    CapExceeded,
    ContFracBreakdown,
    DomainError,
    GridError,
    OracleUnstable,
    PoleError,
    QuadratureError,
    SingularMatrix,
)
from .eta_core import (
    EvalResult,
    WeightTable,
    eta_reference,
    eta_series,
    eta_series_exact,
    h_factor,
    weights,
)
from .sampling import (
    dixon_anderson_gibbs,
    dixon_anderson_log_density,
    dixon_anderson_rejection,
    eta_mc,
    exp_moment_mc,
    psi_closed,
    psi_mc,
    ratio_mc,
)

__all__ = [
    "__version__",
    "AltzetaError",
    "CapExceeded",
    "ContFracBreakdown",
    "DomainError",
    "EnsembleSpec",
    "EvalResult",
    "GridError",
    "MCEstimate",
    "OracleUnstable",
    "OrderedGrid",
    "PoleError",
    "QuadratureError",
    "SamplerConfig",
    "SingularMatrix",
    "WeightTable",
    "alternating_sum",
    "available_backends",
    "avg_ratio_closed",
    "avg_ratio_mc",
    "avg_ratio_quadrature",
    "backend_name",
    "weighted_ratio_integral_quadrature",
    "density_eval",
    "detVs_integral_quadrature",
    "dixon_anderson_gibbs",
    "dixon_anderson_log_density",
    "dixon_anderson_rejection",
    "eta_contfrac",
    "eta_det",
    "eta_mc",
    "eta_reference",
    "eta_series",
    "eta_series_exact",
    "eta_tridiag",
    "exp_moment_mc",
    "gen_vandermonde_ratio",
    "h_factor",
    "iter_ensemble",
    "laguerre_norm",
    "psi_closed",
    "psi_mc",
    "ratio_mc",
    "sample_ensemble",
    "selberg_value",
    "squares_grid",
    "tridiag_coeffs",
    "tridiag_recurrence",
    "weights",
]
