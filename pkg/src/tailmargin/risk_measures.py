"""VaR, Expected Shortfall and exponential spectral risk measures from a GPD tail.

All measures are functionals of the peaks-over-threshold quantile

    q(p) = u + beta / xi * (((n / N_u) * (1 - p)) ** (-xi) - 1)

where ``p`` is the confidence level. The spectral measure weights these
quantiles with the exponential risk-aversion spectrum

    phi(p) = R * exp(-R * (1 - p)) / (1 - exp(-R)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from tailmargin.errors import DomainError, InputError
from tailmargin.gpd import XI_TOL, GpdFit
from tailmargin.quadrature import QuadratureConfig, integrate

Kind = Literal["VaR", "ES", "SRM"]
_KINDS = {"var": "VaR", "es": "ES", "srm": "SRM"}


@dataclass(frozen=True)
class RiskMeasureSpec:
    kind: Kind
    alpha: float | None = None
    R: float | None = None

    def __post_init__(self):
        kind = _KINDS.get(str(self.kind).lower())
        if kind is None:
            raise InputError(f"unknown risk measure {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "SRM":
            if self.alpha is not None:
                raise InputError("SRM takes a risk aversion R, not a confidence level")
            if self.R is None or not self.R > 0:
                raise DomainError(f"risk aversion R must be positive, got {self.R}")
        else:
            if self.R is not None:
                raise InputError(f"{kind} takes a confidence level alpha, not R")
            if self.alpha is None or not 0 < self.alpha <= 1:
                raise DomainError(f"confidence level must lie in (0, 1], got {self.alpha}")

    @classmethod
    def var(cls, alpha):
        return cls("VaR", alpha=alpha)

    @classmethod
    def es(cls, alpha):
        return cls("ES", alpha=alpha)

    @classmethod
    def srm(cls, R):
        return cls("SRM", R=R)

    @property
    def param(self) -> float:
        return self.R if self.kind == "SRM" else self.alpha

    @property
    def param_name(self) -> str:
        return "R" if self.kind == "SRM" else "alpha"

    def __str__(self):
        return f"{self.kind}({self.param_name}={self.param:g})"


@dataclass(frozen=True)
class RiskEstimate:
    value: float
    spec: RiskMeasureSpec
    fit: GpdFit
    quadrature: QuadratureConfig | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.spec.kind, self.spec.param_name: self.spec.param, "value": self.value,
             "fit_id": self.fit.label}
        if self.quadrature is not None:
            d["engine"] = self.quadrature.engine
            d["slices"] = self.quadrature.slices
        return d


def pot_quantile(p, fit: GpdFit):
    """Tail quantile at confidence level ``p`` (scalar or array).

    Evaluated as written for every ``p``; below ``1 - N_u / n`` it
    extrapolates under the threshold.
    """
    p_arr = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore"):
        log_t = np.log(fit.n / fit.n_u) + np.log1p(-p_arr)
    if abs(fit.xi) < XI_TOL:
        out = fit.u - fit.beta * log_t
    else:
        out = fit.u + fit.beta / fit.xi * np.expm1(-fit.xi * log_t)
    return float(out) if np.ndim(p) == 0 else out


def _check_alpha(fit: GpdFit, alpha: float):
    if not 0 < alpha <= 1:
        raise DomainError(f"confidence level must lie in (0, 1], got {alpha}")
    if alpha == 1 and fit.xi >= 0:
        raise DomainError("infinite quantile: alpha = 1 with xi >= 0")
    if (fit.n / fit.n_u) * (1 - alpha) > 1 + 1e-12:
        warnings.warn(
            f"alpha={alpha} lies below the fitted tail (1 - N_u/n = {1 - fit.prob:.4f}); "
            "the estimate extrapolates under the threshold"
        )


def var_gpd(fit: GpdFit, alpha: float) -> RiskEstimate:
    _check_alpha(fit, alpha)
    if alpha == 1:
        value = fit.u - fit.beta / fit.xi
    else:
        value = pot_quantile(alpha, fit)
    return RiskEstimate(float(value), RiskMeasureSpec.var(alpha), fit)


def es_from_var(var: float, fit: GpdFit) -> float:
    """Expected Shortfall given the VaR at the same confidence level."""
    return var / (1 - fit.xi) + (fit.beta - fit.xi * fit.u) / (1 - fit.xi)


def es_gpd(fit: GpdFit, alpha: float) -> RiskEstimate:
    if fit.xi >= 1:
        raise DomainError(f"infinite ES: xi={fit.xi} >= 1")
    q = var_gpd(fit, alpha).value
    return RiskEstimate(float(es_from_var(q, fit)), RiskMeasureSpec.es(alpha), fit)


def spectrum_exp(p, R: float):
    """Exponential risk-aversion weight ``phi(p)``."""
    if not R > 0:
        raise DomainError(f"risk aversion R must be positive, got {R}")
    p_arr = np.asarray(p, dtype=float)
    out = R * np.exp(-R * (1 - p_arr)) / -math.expm1(-R)
    return float(out) if np.ndim(p) == 0 else out


def spectrum_cell_weight(i, n_cells: int, R: float):
    """Exact mass of ``phi`` over the cell ``[(i - 1) / n_cells, i / n_cells]``.

    ``i`` is 1-based and may be an array; the weights over all cells sum to 1.
    """
    if not R > 0:
        raise DomainError(f"risk aversion R must be positive, got {R}")
    i_arr = np.asarray(i)
    if np.any((i_arr < 1) | (i_arr > n_cells)):
        raise InputError(f"cell index outside 1..{n_cells}")
    i_arr = i_arr.astype(float)
    # exp(-R(1-b)) - exp(-R(1-a)) = exp(-R(1-b)) * (1 - exp(-R/n))
    upper = np.exp(-R * (1 - i_arr / n_cells))
    out = upper * -math.expm1(-R / n_cells) / -math.expm1(-R)
    return float(out) if np.ndim(i) == 0 else out


DEFAULT_QUADRATURE = QuadratureConfig("trapezoid", 1_000_000)


def srm_gpd(fit: GpdFit, R: float, quad: QuadratureConfig | None = None) -> RiskEstimate:
    """Exponential spectral risk measure of the fitted tail by numerical quadrature.

    The integrand ``phi(p) * q(p)`` is singular at ``p = 1`` when ``xi > 0``;
    the engines in :mod:`tailmargin.quadrature` never place a node there.
    """
    spec = RiskMeasureSpec.srm(R)
    quad = quad or DEFAULT_QUADRATURE
    if fit.xi >= 1:
        warnings.warn(f"xi={fit.xi} >= 1: the spectral integral diverges")

    def integrand(p):
        return spectrum_exp(p, R) * pot_quantile(p, fit)

    return RiskEstimate(float(integrate(integrand, quad)), spec, fit, quad)


def srm_discrete(sorted_losses, R: float) -> float:
    """Spectral measure of an ordered sample, one spectrum cell per observation."""
    x = np.asarray(sorted_losses, dtype=float)
    if x.size < 2:
        raise InputError("need at least 2 losses")
    if np.any(np.diff(x) < 0):
        raise InputError("losses must be sorted ascending")
    w = spectrum_cell_weight(np.arange(1, x.size + 1), x.size, R)
    return float(w @ x)


def evaluate(fit: GpdFit, spec: RiskMeasureSpec, quad: QuadratureConfig | None = None) -> RiskEstimate:
    if spec.kind == "VaR":
        return var_gpd(fit, spec.alpha)
    if spec.kind == "ES":
        return es_gpd(fit, spec.alpha)
    return srm_gpd(fit, spec.R, quad)
