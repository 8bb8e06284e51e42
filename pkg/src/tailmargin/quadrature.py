"""One-dimensional integration over [0, 1) and the slice-count error benchmark.

Engines
-------
trapezoid
    Composite trapezoid on the nodes ``i / N`` for ``i = 0 .. N - 1``. The
    endpoint ``p = 1`` is never evaluated because tail integrands diverge
    there, so the rule covers ``[0, (N - 1) / N]``.
simpson
    Composite Simpson on ``i / N`` for ``i = 1 .. N - 1`` (``N - 2`` intervals,
    so ``N`` must be even).
pseudo_mc
    Mean of ``f`` at ``N`` seeded uniform draws.
weyl
    Mean of ``f`` at ``frac(i * sqrt(2))``, ``i = 1 .. N``.
niederreiter
    Mean of ``f`` at the base-2 van der Corput points, ``i = 1 .. N``.

With ``grid="closed"`` the Newton-Cotes rules use ``i / N`` for
``i = 0 .. N`` instead, for integrands that are finite at 1.

Node values are summed chunk by chunk with :func:`math.fsum` over fixed
chunk boundaries, so a result is bit-identical whatever the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from tailmargin.errors import DomainError, InputError

Engine = Literal["trapezoid", "simpson", "pseudo_mc", "weyl", "niederreiter"]
ENGINES = ("trapezoid", "simpson", "pseudo_mc", "weyl", "niederreiter")
CHUNK = 1 << 18
SQRT2 = math.sqrt(2.0)
BASELINE_SLICES = 20_000_000


@dataclass(frozen=True)
class QuadratureConfig:
    engine: Engine = "trapezoid"
    slices: int = 1_000_000
    seed: int = 0
    grid: Literal["open", "closed"] = "open"

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise InputError(f"unknown quadrature engine {self.engine!r}; choose from {ENGINES}")
        if self.grid not in ("open", "closed"):
            raise InputError(f"grid must be 'open' or 'closed', got {self.grid!r}")
        if int(self.slices) != self.slices or self.slices < 2:
            raise InputError(f"slice count must be an integer >= 2, got {self.slices}")
        if self.engine == "simpson":
            if self.slices % 2:
                raise InputError(f"simpson needs an even slice count, got {self.slices}")
            if self.grid == "open" and self.slices < 4:
                raise InputError("simpson on the open grid needs at least 4 slices")


def weyl_nodes(start: int, stop: int) -> np.ndarray:
    """``frac(i * sqrt(2))`` for ``i`` in ``[start, stop)``."""
    i = np.arange(start, stop, dtype=np.float64)
    return np.mod(i * SQRT2, 1.0)


def van_der_corput(start: int, stop: int) -> np.ndarray:
    """Base-2 radical inverse of the integers in ``[start, stop)``."""
    i = np.arange(start, stop, dtype=np.uint64)
    out = np.zeros(i.shape, dtype=np.float64)
    scale = 0.5
    while i.any():
        out += (i & np.uint64(1)) * scale
        i >>= np.uint64(1)
        scale *= 0.5
    return out


@dataclass(frozen=True)
class _Rule:
    """Node generator plus integer-friendly weights and an overall scale."""

    count: int
    scale: float
    nodes: Callable[[int, int], np.ndarray]
    coeffs: Callable[[int, int], np.ndarray | float]


def _rule(config: QuadratureConfig) -> _Rule:
    N = int(config.slices)
    h = 1.0 / N
    eng = config.engine
    if eng in ("trapezoid", "simpson"):
        if config.grid == "closed":
            first, last = 0, N
        elif eng == "trapezoid":
            first, last = 0, N - 1
        else:
            first, last = 1, N - 1
        count = last - first + 1

        def nodes(a, b):
            return np.arange(first + a, first + b, dtype=np.float64) * h

        if eng == "trapezoid":
            def coeffs(a, b):
                c = np.ones(b - a)
                if a == 0:
                    c[0] = 0.5
                if b == count:
                    c[-1] = 0.5
                return c
            return _Rule(count, h, nodes, coeffs)

        def coeffs(a, b):
            k = np.arange(a, b)
            c = np.where(k % 2 == 1, 4.0, 2.0)
            c[(k == 0) | (k == count - 1)] = 1.0
            return c
        return _Rule(count, h / 3.0, nodes, coeffs)

    if eng == "weyl":
        return _Rule(N, h, lambda a, b: weyl_nodes(a + 1, b + 1), lambda a, b: 1.0)
    if eng == "niederreiter":
        return _Rule(N, h, lambda a, b: van_der_corput(a + 1, b + 1), lambda a, b: 1.0)

    def pseudo(a, b):
        stream = np.random.SeedSequence(config.seed, spawn_key=(a // CHUNK,))
        return np.random.default_rng(stream).random(b - a)
    return _Rule(N, h, pseudo, lambda a, b: 1.0)


def quadrature_nodes(config: QuadratureConfig) -> np.ndarray:
    """All evaluation points of ``config``, in evaluation order."""
    rule = _rule(config)
    return rule.nodes(0, rule.count)


def integrate(f: Callable[[np.ndarray], np.ndarray], config: QuadratureConfig,
              workers: int | None = None) -> float:
    """Integrate a vectorised ``f`` over [0, 1) with the configured engine.

    Raises
    ------
    DomainError
        ``f`` is not finite at some node.
    """
    rule = _rule(config)
    bounds = [(a, min(a + CHUNK, rule.count)) for a in range(0, rule.count, CHUNK)]

    def chunk_sum(ab):
        a, b = ab
        p = rule.nodes(a, b)
        y = np.asarray(f(p), dtype=float)
        if not np.all(np.isfinite(y)):
            k = int(np.flatnonzero(~np.isfinite(y))[0])
            raise DomainError(f"integrand not finite at node p={float(p[k])!r}")
        return math.fsum(y * rule.coeffs(a, b))

    if workers and workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(chunk_sum, bounds))
    else:
        partials = [chunk_sum(ab) for ab in bounds]
    return rule.scale * math.fsum(partials)


def _pct(e: float) -> str:
    # rounding a tiny negative error must not print as "-0.00"
    s = f"{e:.2f}"
    return "0.00" if s == "-0.00" else s


@dataclass
class BenchTable:
    """Percent errors of each engine against a high-resolution baseline."""

    baseline: float
    slices: list[int]
    errors: dict[str, list[float]] = field(default_factory=dict)

    def rows(self):
        for engine, errs in self.errors.items():
            yield engine, errs

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["engine", *self.slices])
            for engine, errs in self.rows():
                w.writerow([engine, *(_pct(e) for e in errs)])


def bench_errors(
    fit,
    R: float,
    engines: Sequence[str] = ("trapezoid", "simpson", "niederreiter", "weyl"),
    slice_grid: Sequence[int] = (1_000, 10_000, 100_000, 1_000_000, 10_000_000),
    baseline_slices: int = BASELINE_SLICES,
    pseudo_samples: int = 100,
    seed: int = 0,
    workers: int | None = None,
) -> BenchTable:
    """Error table for the spectral integral of ``fit`` at risk aversion ``R``.

    Each cell is ``100 * (estimate - baseline) / baseline`` where the baseline
    is the trapezoid rule at ``baseline_slices``. For ``pseudo_mc`` the cell is
    instead the standard deviation, in percent of the baseline, of
    ``pseudo_samples`` independently seeded estimates.
    """
    from tailmargin.risk_measures import pot_quantile, spectrum_exp

    def f(p):
        return spectrum_exp(p, R) * pot_quantile(p, fit)

    baseline = integrate(f, QuadratureConfig("trapezoid", baseline_slices), workers)
    table = BenchTable(baseline, [int(n) for n in slice_grid])
    for engine in engines:
        errs = []
        for n in slice_grid:
            if engine == "pseudo_mc":
                est = [integrate(f, QuadratureConfig("pseudo_mc", n, seed=seed + k), workers)
                       for k in range(pseudo_samples)]
                errs.append(100.0 * float(np.std(est, ddof=1)) / baseline)
            else:
                est = integrate(f, QuadratureConfig(engine, n), workers)
                errs.append(100.0 * (est - baseline) / baseline)
        table.errors[engine] = errs
    return table
