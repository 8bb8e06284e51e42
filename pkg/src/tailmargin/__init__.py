"""Extreme-value margin analytics for futures positions.

Peaks-over-threshold Generalised Pareto tails, closed-form VaR and
Expected Shortfall, exponential spectral risk measures, semi-parametric
bootstrap precision estimates and a quadrature benchmark.
"""

from tailmargin.errors import DomainError, FitError, InputError, TailMarginError
from tailmargin.gpd import (
    GpdFit,
    GpdParams,
    extract_exceedances,
    fit_gpd_mle,
    gpd_cdf,
    gpd_quantile,
)
from tailmargin.market_data import (
    LossSeries,
    PriceSeries,
    ReturnSeries,
    compute_returns,
    load_prices,
    to_losses,
)
from tailmargin.quadrature import QuadratureConfig, bench_errors, integrate
from tailmargin.risk_measures import (
    RiskEstimate,
    RiskMeasureSpec,
    es_gpd,
    pot_quantile,
    spectrum_cell_weight,
    spectrum_exp,
    srm_discrete,
    srm_gpd,
    var_gpd,
)
from tailmargin.bootstrap import BootstrapConfig, BootstrapSummary, boot_risk
from tailmargin.fixtures import BENCHMARK_FIT, FIXTURES, get_fixture

__version__ = "0.1.0"

__all__ = [
    "BENCHMARK_FIT",
    "FIXTURES",
    "BootstrapConfig",
    "BootstrapSummary",
    "DomainError",
    "FitError",
    "GpdFit",
    "GpdParams",
    "InputError",
    "LossSeries",
    "PriceSeries",
    "QuadratureConfig",
    "ReturnSeries",
    "RiskEstimate",
    "RiskMeasureSpec",
    "TailMarginError",
    "bench_errors",
    "boot_risk",
    "compute_returns",
    "es_gpd",
    "extract_exceedances",
    "fit_gpd_mle",
    "get_fixture",
    "gpd_cdf",
    "gpd_quantile",
    "integrate",
    "load_prices",
    "pot_quantile",
    "spectrum_cell_weight",
    "spectrum_exp",
    "srm_discrete",
    "srm_gpd",
    "to_losses",
    "var_gpd",
]
