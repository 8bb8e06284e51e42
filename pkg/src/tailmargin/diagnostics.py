"""Threshold-choice diagnostics: normal QQ pairs, mean excess, shape stability."""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from scipy import stats

from tailmargin.errors import InputError, TailMarginError
from tailmargin.gpd import fit_gpd_mle

Kind = Literal["qq_normal", "mean_excess", "shape_stability"]


@dataclass(frozen=True)
class DiagnosticCurve:
    x: np.ndarray
    y: np.ndarray
    kind: Kind

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape:
            raise ValueError("x and y differ in shape")
        if np.any(np.diff(x) <= 0):
            raise ValueError("x must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    def __len__(self):
        return self.x.size

    def to_csv(self, path) -> Path:
        path = Path(path)
        lines = [f"# kind={self.kind}", "x,y"]
        lines += [f"{a!r},{b!r}" for a, b in zip(self.x.tolist(), self.y.tolist())]
        path.write_text("\n".join(lines) + "\n")
        return path


def _values(series) -> np.ndarray:
    return np.asarray(getattr(series, "values", series), dtype=float)


def qq_normal(series) -> DiagnosticCurve:
    """Normal QQ pairs: location-scale matched normal quantile vs order statistic.

    Plotting positions are ``(i - 0.5) / n``.
    """
    x = np.sort(_values(series))
    n = x.size
    if n < 10:
        raise InputError(f"QQ plot needs at least 10 observations, got {n}")
    sd = x.std(ddof=1)
    if sd == 0:
        raise InputError("degenerate sample: zero variance")
    theo = x.mean() + sd * stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    return DiagnosticCurve(theo, x, "qq_normal")


def mean_excess(series, thresholds, min_exceedances: int = 5) -> DiagnosticCurve:
    """Empirical mean excess ``e(u) = mean(x - u | x > u)`` on a threshold grid.

    Thresholds leaving fewer than ``min_exceedances`` points are dropped with a
    warning.
    """
    x = _values(series)
    us, es = [], []
    for u in np.unique(np.asarray(thresholds, dtype=float)):
        tail = x[x > u]
        if tail.size < min_exceedances:
            warnings.warn(f"mean excess: u={u:g} leaves {tail.size} exceedances, point omitted")
            continue
        us.append(u)
        es.append(float(np.mean(tail - u)))
    return DiagnosticCurve(np.array(us), np.array(es), "mean_excess")


def shape_stability(series, thresholds, min_exceedances: int = 5,
                    workers: int = 1) -> DiagnosticCurve:
    """Fitted shape against exceedance count across a threshold grid.

    Points are ordered by exceedance count (the x axis); a threshold whose
    fit fails, or that ties an earlier count, is omitted with a warning.
    """
    x = _values(series)
    grid = np.unique(np.asarray(thresholds, dtype=float))

    def one(u):
        exc = x[x > u] - u
        if exc.size < min_exceedances:
            return u, None, f"{exc.size} exceedances"
        try:
            fit = fit_gpd_mle(exc, u=u, n=x.size, min_exceedances=min_exceedances)
        except TailMarginError as err:
            return u, None, str(err)
        return u, fit, None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, grid))
    else:
        results = [one(u) for u in grid]

    pts = {}
    for u, fit, why in results:
        if fit is None:
            warnings.warn(f"shape stability: u={u:g} omitted ({why})")
        elif fit.n_u in pts:
            warnings.warn(f"shape stability: u={u:g} repeats N_u={fit.n_u}, point omitted")
        else:
            pts[fit.n_u] = fit.xi
    counts = sorted(pts)
    return DiagnosticCurve(np.array(counts, dtype=float), np.array([pts[c] for c in counts]),
                           "shape_stability")


def parse_grid(text: str) -> np.ndarray:
    """``"a:b:step"`` (inclusive) or a comma list into a threshold array."""
    text = text.strip()
    try:
        if ":" in text:
            a, b, step = (float(t) for t in text.split(":"))
            k = int(np.floor((b - a) / step + 1e-9))
            return a + step * np.arange(k + 1)
        return np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise InputError(f"bad threshold grid {text!r}") from None
