"""Generalised Pareto distribution over threshold exceedances.

The GPD is parametrised by shape ``xi`` and scale ``beta``::

    G(x) = 1 - (1 + xi * x / beta) ** (-1 / xi)     xi != 0
    G(x) = 1 - exp(-x / beta)                        xi == 0

with support ``[0, inf)`` for ``xi >= 0`` and ``[0, -beta / xi]`` otherwise.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize

from tailmargin.errors import DomainError, FitError, InputError

XI_TOL = 1e-8
SUPPORT_SLACK = 1e-12
MIN_EXCEEDANCES = 30
# below this |xi| the likelihood derivatives use their xi -> 0 limits
_HESS_XI_TOL = 1e-4


@dataclass(frozen=True)
class GpdParams:
    xi: float
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"scale must be positive, got {self.beta}")


@dataclass(frozen=True)
class GpdFit:
    """A peaks-over-threshold fit: GPD parameters plus tail bookkeeping.

    ``n`` is the full sample size and ``n_u`` the number of losses above
    ``u``; the tail probability ``n_u / n`` enters every tail quantile.
    """

    xi: float
    beta: float
    u: float
    n: int
    n_u: int
    se_xi: float = float("nan")
    se_beta: float = float("nan")
    loglik: float = float("nan")
    converged: bool = True
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"scale must be positive, got {self.beta}")
        if not 0 < self.n_u <= self.n:
            raise InputError(f"need 0 < N_u <= n, got N_u={self.n_u}, n={self.n}")

    @property
    def params(self) -> GpdParams:
        return GpdParams(self.xi, self.beta)

    @property
    def prob(self) -> float:
        return self.n_u / self.n

    def scaled(self, lam: float) -> "GpdFit":
        """Fit for losses multiplied by ``lam`` (threshold and scale scale)."""
        return GpdFit(
            self.xi, self.beta * lam, self.u * lam, self.n, self.n_u,
            self.se_xi, self.se_beta * lam, self.loglik, self.converged, self.label,
        )

    def to_dict(self) -> dict:
        d = {
            "xi": self.xi,
            "beta": self.beta,
            "u": self.u,
            "n": self.n,
            "N_u": self.n_u,
            "prob": round(self.prob, 4),
            "se_xi": _json_float(self.se_xi),
            "se_beta": _json_float(self.se_beta),
            "loglik": _json_float(self.loglik),
        }
        if not self.converged:
            d["converged"] = False
        if self.label:
            d["label"] = self.label
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GpdFit":
        try:
            return cls(
                xi=float(d["xi"]),
                beta=float(d["beta"]),
                u=float(d["u"]),
                n=int(d["n"]),
                n_u=int(d["N_u"]),
                se_xi=_nan(d.get("se_xi")),
                se_beta=_nan(d.get("se_beta")),
                loglik=_nan(d.get("loglik")),
                converged=bool(d.get("converged", True)),
                label=d.get("label"),
            )
        except KeyError as exc:
            raise InputError(f"fit record lacks field {exc.args[0]!r}") from None

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "GpdFit":
        path = Path(path)
        if not path.is_file():
            raise InputError(f"fit file not found: {path}")
        try:
            return cls.from_dict(json.loads(path.read_text()))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not valid JSON ({exc})") from None


def _json_float(v):
    return None if v is None or not math.isfinite(v) else v


def _nan(v):
    return float("nan") if v is None else float(v)


def _upper_support(params: GpdParams) -> float:
    return -params.beta / params.xi if params.xi < 0 else math.inf


def gpd_cdf(x, params: GpdParams):
    """Distribution function of the exceedance ``x`` (scalar or array)."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("exceedance must be non-negative")
    top = _upper_support(params)
    if np.any(x_arr > top * (1 + SUPPORT_SLACK) + SUPPORT_SLACK):
        raise DomainError(f"exceedance beyond support endpoint {top}")
    xi, beta = params.xi, params.beta
    if abs(xi) < XI_TOL:
        out = -np.expm1(-x_arr / beta)
    else:
        z = np.maximum(1.0 + xi * x_arr / beta, 0.0)
        with np.errstate(divide="ignore"):
            out = -np.expm1(-np.log(z) / xi)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.ndim(x) == 0 else out


def gpd_quantile(q, params: GpdParams):
    """Inverse of :func:`gpd_cdf`."""
    q_arr = np.asarray(q, dtype=float)
    if np.any((q_arr < 0) | (q_arr > 1)):
        raise DomainError("probability must lie in [0, 1]")
    xi, beta = params.xi, params.beta
    if np.any(q_arr == 1) and xi >= 0:
        raise DomainError("quantile at probability 1 is infinite for xi >= 0")
    with np.errstate(divide="ignore"):
        log_tail = np.log1p(-q_arr)
    if abs(xi) < XI_TOL:
        out = -beta * log_tail
    else:
        out = beta / xi * np.expm1(-xi * log_tail)
    return float(out) if np.ndim(q) == 0 else out


def extract_exceedances(losses, u: float) -> np.ndarray:
    """Amounts by which losses strictly exceed ``u``, in input order."""
    if not u > 0:
        raise InputError(f"threshold must be positive, got {u}")
    values = np.asarray(getattr(losses, "values", losses), dtype=float)
    exc = values[values > u] - u
    if exc.size == 0:
        raise InputError(f"empty tail: no losses exceed u={u}")
    return exc


def gpd_loglik(xi: float, beta: float, x) -> float:
    """Log-likelihood of exceedances ``x``; ``-inf`` outside the parameter space."""
    x = np.asarray(x, dtype=float)
    if beta <= 0:
        return -math.inf
    if abs(xi) < XI_TOL:
        return float(-x.size * math.log(beta) - x.sum() / beta)
    z = 1.0 + xi * x / beta
    if np.any(z <= 0):
        return -math.inf
    return float(-x.size * math.log(beta) - (1.0 + 1.0 / xi) * np.log(z).sum())


def gpd_score(xi: float, beta: float, x) -> np.ndarray:
    """Gradient of :func:`gpd_loglik` with respect to ``(xi, beta)``."""
    x = np.asarray(x, dtype=float)
    if abs(xi) < _HESS_XI_TOL:
        r = x / beta
        return np.array([np.sum(r * r / 2 - r), np.sum(-1.0 / beta + x / beta**2)])
    d = beta + xi * x
    log_ratio = np.log1p(xi * x / beta)
    g_xi = np.sum(log_ratio / xi**2 - (1 + 1 / xi) * x / d)
    g_beta = np.sum(1 / (xi * beta) - (1 + 1 / xi) / d)
    return np.array([g_xi, g_beta])


def gpd_hessian(xi: float, beta: float, x) -> np.ndarray:
    """Analytic Hessian of :func:`gpd_loglik` in ``(xi, beta)``."""
    x = np.asarray(x, dtype=float)
    if abs(xi) < _HESS_XI_TOL:
        r = x / beta
        h_xx = np.sum(r * r - 2 * r**3 / 3)
        h_xb = np.sum(x * (beta - x) / beta**3)
        h_bb = np.sum((beta - 2 * x) / beta**3)
    else:
        d = beta + xi * x
        log_ratio = np.log1p(xi * x / beta)
        h_xx = np.sum(-2 * log_ratio / xi**3 + 2 * x / (xi**2 * d) + (1 + 1 / xi) * x**2 / d**2)
        h_xb = np.sum(-1 / (xi**2 * beta) + 1 / (xi**2 * d) + (1 + 1 / xi) * x / d**2)
        h_bb = np.sum(-1 / (xi * beta**2) + (1 + 1 / xi) / d**2)
    return np.array([[h_xx, h_xb], [h_xb, h_bb]])


def _moment_start(x: np.ndarray) -> tuple[float, float]:
    m, v = x.mean(), x.var(ddof=1)
    ratio = m * m / v
    return 0.5 * (1 - ratio), 0.5 * m * (ratio + 1)


def fit_gpd_mle(
    exceedances,
    u: float = 0.0,
    n: int | None = None,
    min_exceedances: int = MIN_EXCEEDANCES,
    label: str | None = None,
) -> GpdFit:
    """Maximum-likelihood GPD fit with observed-information standard errors.

    Parameters
    ----------
    exceedances : array_like
        Positive amounts above the threshold (see :func:`extract_exceedances`).
    u : float
        Threshold the exceedances were taken over; stored on the fit.
    n : int, optional
        Full sample size. Defaults to the number of exceedances.
    min_exceedances : int
        Smallest tail that will be fitted.

    Raises
    ------
    InputError
        Tail smaller than ``min_exceedances``.
    FitError
        Zero-variance tail or an optimiser that fails to converge; the
        exception's ``best`` attribute holds the best ``(xi, beta)`` seen.
    """
    x = np.asarray(exceedances, dtype=float)
    if x.size < min_exceedances:
        raise InputError(f"insufficient tail: {x.size} exceedances < {min_exceedances}")
    if np.any(x < 0):
        raise InputError("exceedances must be non-negative")
    if np.ptp(x) == 0:
        raise FitError("degenerate tail: all exceedances equal", best=(-1.0, float(x[0])))
    n = x.size if n is None else int(n)
    xmax = x.max()

    def nll(theta):
        xi, log_beta = theta
        ll = gpd_loglik(xi, math.exp(log_beta), x)
        if not math.isfinite(ll):
            # infeasible point: penalise by distance into the forbidden region
            beta = math.exp(log_beta)
            return 1e10 * (1 + max(0.0, -(beta + xi * xmax)))
        return -ll

    starts = [_moment_start(x), (0.1, x.mean())]
    best = None
    for xi0, beta0 in starts:
        if not beta0 > 0:
            continue
        # pull infeasible starts (xi < 0 with short support) back inside
        if xi0 < 0 and beta0 + xi0 * xmax <= 0:
            beta0 = -xi0 * xmax * 1.1
        res = optimize.minimize(
            nll,
            x0=[max(xi0, -0.95), math.log(beta0)],
            method="Nelder-Mead",
            bounds=[(-1.0, 5.0), (math.log(xmax) - 40, math.log(xmax) + 10)],
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000},
        )
        if best is None or res.fun < best.fun:
            best = res
    xi, beta = float(best.x[0]), float(math.exp(best.x[1]))
    xi, beta = _newton_polish(xi, beta, x)
    ll = gpd_loglik(xi, beta, x)

    grad = gpd_score(xi, beta, x)
    scale = np.abs(np.array([1.0, beta]))
    if not math.isfinite(ll) or np.max(np.abs(grad * scale)) > 1e-3 * max(1.0, abs(ll)):
        raise FitError(f"maximum likelihood did not converge (xi={xi:.4g}, beta={beta:.4g})", best=(xi, beta))

    se_xi = se_beta = float("nan")
    if xi <= -0.5:
        warnings.warn("xi <= -0.5: information matrix is not regular, standard errors omitted")
    else:
        info = -gpd_hessian(xi, beta, x)
        try:
            cov = np.linalg.inv(info)
            if cov[0, 0] > 0 and cov[1, 1] > 0:
                se_xi, se_beta = math.sqrt(cov[0, 0]), math.sqrt(cov[1, 1])
        except np.linalg.LinAlgError:
            pass
    if xi >= 1:
        warnings.warn(f"xi={xi:.3f} >= 1: the tail has no finite mean")
    return GpdFit(xi, beta, float(u), n, int(x.size), se_xi, se_beta, ll, True, label)


def _newton_polish(xi: float, beta: float, x: np.ndarray, steps: int = 20) -> tuple[float, float]:
    ll = gpd_loglik(xi, beta, x)
    for _ in range(steps):
        g = gpd_score(xi, beta, x)
        h = gpd_hessian(xi, beta, x)
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            break
        # only accept ascent steps from a negative-definite Hessian
        if g @ step >= 0:
            break
        t = 1.0
        while t > 1e-6:
            cand_xi, cand_beta = xi - t * step[0], beta - t * step[1]
            cand = gpd_loglik(cand_xi, cand_beta, x)
            if cand >= ll:
                break
            t /= 2
        else:
            break
        if abs(cand_xi - xi) < 1e-14 and abs(cand_beta - beta) < 1e-14 * beta:
            xi, beta, ll = cand_xi, cand_beta, cand
            break
        xi, beta, ll = cand_xi, cand_beta, cand
    return float(xi), float(beta)


def fit_losses(losses, u: float, min_exceedances: int = MIN_EXCEEDANCES, label: str | None = None) -> GpdFit:
    """Extract exceedances over ``u`` from a loss series and fit them."""
    values = np.asarray(getattr(losses, "values", losses), dtype=float)
    exc = extract_exceedances(values, u)
    return fit_gpd_mle(exc, u=u, n=values.size, min_exceedances=min_exceedances, label=label)
