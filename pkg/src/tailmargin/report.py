"""Regenerate the VaR/ES/SRM tables and figure data from the fixture registry."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from tailmargin.bootstrap import BootstrapConfig, boot_many, summary_record, write_records
from tailmargin.fixtures import BENCHMARK_FIT, CONTRACTS, FIXTURES, POSITIONS
from tailmargin.quadrature import BASELINE_SLICES, QuadratureConfig, bench_errors
from tailmargin.risk_measures import (
    RiskMeasureSpec,
    es_gpd,
    spectrum_exp,
    srm_gpd,
    var_gpd,
)

log = logging.getLogger(__name__)

ALPHAS = (0.98, 0.99, 0.995, 0.999)
RS = (20, 100, 200)
BENCH_SLICES = (1_000, 10_000, 100_000, 1_000_000, 10_000_000)
BENCH_ENGINES = ("trapezoid", "simpson", "niederreiter", "weyl")


@dataclass
class ReportConfig:
    out: Path = Path("report")
    resamples: int = 5000
    seed: int = 0
    srm_estimator: str = "sampled"
    slices: int = 1_000_000
    baseline_slices: int = BASELINE_SLICES
    bench_slices: tuple = BENCH_SLICES
    figures: bool = True
    # step of the slice sweep behind the convergence figure (0 disables it)
    sweep_step: int = 100
    sweep_max: int = 50_000
    workers: int = 1


def _write(path: Path, header, rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def _fmt(v, digits):
    return f"{v:.{digits}f}"


def table2(out: Path) -> Path:
    rows = []
    for name, fn in (("VaR", var_gpd), ("ES", es_gpd)):
        for c in CONTRACTS:
            for p in POSITIONS:
                fit = FIXTURES[(c, p)]
                rows.append([name, c, p, *(_fmt(fn(fit, a).value, 3) for a in ALPHAS)])
    return _write(out / "tables2.csv", ["measure", "contract", "position", *map(str, ALPHAS)], rows)


def table6(out: Path, quad: QuadratureConfig) -> Path:
    rows = []
    for c in CONTRACTS:
        for p in POSITIONS:
            fit = FIXTURES[(c, p)]
            rows.append([c, p, *(_fmt(srm_gpd(fit, R, quad).value, 4) for R in RS)])
    return _write(out / "tables6.csv", ["contract", "position", *map(str, RS)], rows)


def table5(out: Path, cfg: ReportConfig):
    table = bench_errors(BENCHMARK_FIT, 100, BENCH_ENGINES, cfg.bench_slices,
                         baseline_slices=cfg.baseline_slices, workers=cfg.workers)
    path = out / "tables5.csv"
    table.to_csv(path)
    return path, table


def bootstrap_tables(out: Path, cfg: ReportConfig, quad: QuadratureConfig) -> list[Path]:
    """Tables of standard errors and standardized 90% intervals, plus the long-form records."""
    specs = ([RiskMeasureSpec.var(a) for a in ALPHAS] + [RiskMeasureSpec.es(a) for a in ALPHAS]
             + [RiskMeasureSpec.srm(R) for R in RS])
    bcfg = BootstrapConfig(cfg.resamples, cfg.seed, 0.90, cfg.srm_estimator, cfg.workers)
    results = {}
    records = []
    for c in CONTRACTS:
        for p in POSITIONS:
            summaries = boot_many(FIXTURES[(c, p)], specs, bcfg, quad)
            for spec, s in zip(specs, summaries):
                results[(c, p, spec.kind, spec.param)] = s
                records.append(summary_record(c, p, spec, s))

    def se_row(measure, c, p, params):
        return [_fmt(results[(c, p, measure, k)].se, 4) for k in params]

    def ci_row(measure, c, p, params):
        cells = []
        for k in params:
            s = results[(c, p, measure, k)]
            cells += [_fmt(s.std_ci_lo, 4), _fmt(s.std_ci_hi, 4)]
        return cells

    t3 = [[m, c, p, *se_row(m, c, p, ALPHAS)] for m in ("VaR", "ES") for c in CONTRACTS for p in POSITIONS]
    t4 = [[m, p, c, *ci_row(m, c, p, ALPHAS)] for m in ("VaR", "ES") for p in POSITIONS for c in CONTRACTS]
    t7 = [[c, p, *se_row("SRM", c, p, RS)] for c in CONTRACTS for p in POSITIONS]
    t8 = [[p, c, *ci_row("SRM", c, p, RS)] for p in POSITIONS for c in CONTRACTS]
    ci_head = lambda params: [f"{k}_{side}" for k in params for side in ("lo", "hi")]  # noqa: E731
    return [
        _write(out / "tables3.csv", ["measure", "contract", "position", *map(str, ALPHAS)], t3),
        _write(out / "tables4.csv", ["measure", "position", "contract", *ci_head(ALPHAS)], t4),
        _write(out / "tables7.csv", ["contract", "position", *map(str, RS)], t7),
        _write(out / "tables8.csv", ["position", "contract", *ci_head(RS)], t8),
        write_records(records, out / "bootstrap.csv"),
    ]


def figure_data(out: Path, cfg: ReportConfig, quad: QuadratureConfig) -> list[Path]:
    """Plot-data CSVs (and PNGs when enabled) for the spectrum, VaR, ES, convergence and SRM figures."""
    paths = []
    p = np.linspace(0, 1, 201)
    spectra = [(f"R={R}", p, spectrum_exp(p, R)) for R in (1, 5, 10, 20)]
    paths.append(_write(out / "fig1_spectrum.csv", ["p", *(s[0] for s in spectra)],
                        [[f"{v:.4f}", *(f"{s[2][i]:.6g}" for s in spectra)] for i, v in enumerate(p)]))

    # every fixture tail starts below 0.97
    alphas = np.round(np.arange(0.97, 0.9991, 0.001), 3)
    curves = {}
    for name, fn, tag in (("VaR", var_gpd, "fig3_var"), ("ES", es_gpd, "fig4_es")):
        cols = {(c, pos): [fn(FIXTURES[(c, pos)], a).value for a in alphas]
                for c in CONTRACTS for pos in POSITIONS}
        curves[tag] = cols
        paths.append(_write(out / f"{tag}.csv", ["alpha", *(f"{c}:{pos}" for c, pos in cols)],
                            [[f"{a:.3f}", *(f"{cols[k][i]:.4f}" for k in cols)] for i, a in enumerate(alphas)]))

    Rs = np.array([5, 10, 15, 20, 30, 40, 50, 60, 80, 100, 125, 150, 175, 200])
    cols = {(c, pos): [srm_gpd(FIXTURES[(c, pos)], float(R), quad).value for R in Rs]
            for c in CONTRACTS for pos in POSITIONS}
    curves["fig6_srm"] = cols
    x6 = 1 - 1 / Rs
    paths.append(_write(out / "fig6_srm.csv", ["R", "one_minus_inv_R", *(f"{c}:{pos}" for c, pos in cols)],
                        [[int(R), f"{x6[i]:.4f}", *(f"{cols[k][i]:.4f}" for k in cols)] for i, R in enumerate(Rs)]))

    sweep = None
    if cfg.sweep_step:
        Ns = np.arange(cfg.sweep_step, cfg.sweep_max + 1, cfg.sweep_step)
        Ns = Ns[Ns >= 4]
        sweep = {e: [srm_gpd(BENCHMARK_FIT, 100, QuadratureConfig(e, int(N))).value for N in Ns]
                 for e in BENCH_ENGINES}
        paths.append(_write(out / "fig5_convergence.csv", ["N", *BENCH_ENGINES],
                            [[int(N), *(f"{sweep[e][i]:.6f}" for e in BENCH_ENGINES)] for i, N in enumerate(Ns)]))

    if cfg.figures:
        from tailmargin import plotting

        paths.append(plotting.line_panel(out / "fig1_spectrum.png", spectra, "cumulative probability p",
                                         "weight phi(p)", "Exponential risk-aversion spectrum"))

        def split(cols, x):
            return ([(c, x, cols[(c, "long")]) for c in CONTRACTS],
                    [(c, x, cols[(c, "short")]) for c in CONTRACTS])

        for tag, xlabel, ylabel, x in (
            ("fig3_var", "confidence level", "VaR (daily %)", alphas),
            ("fig4_es", "confidence level", "ES (daily %)", alphas),
            ("fig6_srm", "1 - 1/R", "spectral risk (daily %)", x6),
        ):
            lo, sh = split(curves[tag], x)
            paths.append(plotting.long_short_panels(out / f"{tag}.png", lo, sh, xlabel, ylabel))
        if sweep is not None:
            paths.append(plotting.line_panel(
                out / "fig5_convergence.png", [(e, Ns, sweep[e]) for e in BENCH_ENGINES],
                "number of slices N", "spectral risk, R=100", "Convergence on the benchmark tail"))
    return paths


def run_report(cfg: ReportConfig) -> list[Path]:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    quad = QuadratureConfig("trapezoid", cfg.slices)
    paths = []
    t0 = time.perf_counter()
    paths.append(table2(out))
    paths.append(table6(out, quad))
    log.info("closed-form tables done in %.1fs", time.perf_counter() - t0)
    path, _ = table5(out, cfg)
    paths.append(path)
    log.info("quadrature benchmark done in %.1fs", time.perf_counter() - t0)
    if cfg.resamples:
        paths += bootstrap_tables(out, cfg, quad)
        log.info("bootstrap tables done in %.1fs", time.perf_counter() - t0)
    paths += figure_data(out, cfg, quad)
    log.info("report written to %s in %.1fs", out, time.perf_counter() - t0)
    return paths
