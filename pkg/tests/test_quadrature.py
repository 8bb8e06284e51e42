import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tailmargin.errors import DomainError, InputError
from tailmargin.quadrature import (
    BenchTable,
    QuadratureConfig,
    bench_errors,
    integrate,
    quadrature_nodes,
    van_der_corput,
    weyl_nodes,
)
from tailmargin.risk_measures import pot_quantile, spectrum_exp


def tail_integrand(fit, R=100.0):
    return lambda p: spectrum_exp(p, R) * pot_quantile(p, fit)


def test_config_validation():
    with pytest.raises(InputError, match="even"):
        QuadratureConfig("simpson", 1001)
    with pytest.raises(InputError):
        QuadratureConfig("midpoint", 10)
    with pytest.raises(InputError):
        QuadratureConfig("trapezoid", 1)
    with pytest.raises(InputError):
        QuadratureConfig("trapezoid", 10.5)


@pytest.mark.parametrize("N", [2, 4, 10, 1000, 123456])
def test_simpson_exact_for_cubics(N):
    val = integrate(lambda x: x**2, QuadratureConfig("simpson", N, grid="closed"))
    assert val == pytest.approx(1 / 3, abs=1e-12)
    val = integrate(lambda x: x**3 - x, QuadratureConfig("simpson", N, grid="closed"))
    assert val == pytest.approx(-0.25, abs=1e-12)


def test_trapezoid_closed_grid_linear():
    assert integrate(lambda x: 3 * x + 1, QuadratureConfig("trapezoid", 7, grid="closed")) == pytest.approx(2.5)


def test_open_grid_excludes_endpoint():
    for engine in ("trapezoid", "simpson"):
        nodes = quadrature_nodes(QuadratureConfig(engine, 1000))
        assert nodes.max() == pytest.approx(0.999)
    assert quadrature_nodes(QuadratureConfig("trapezoid", 1000)).min() == 0.0
    assert quadrature_nodes(QuadratureConfig("simpson", 1000)).min() == pytest.approx(0.001)


def test_weyl_first_nodes():
    np.testing.assert_allclose(weyl_nodes(1, 4), [0.41421, 0.82843, 0.24264], atol=5e-6)


def test_van_der_corput_first_nodes():
    np.testing.assert_array_equal(van_der_corput(1, 8), [0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875])


def test_weyl_mean():
    assert integrate(lambda x: x, QuadratureConfig("weyl", 100_000)) == pytest.approx(0.5, abs=1e-4)
    assert integrate(lambda x: x, QuadratureConfig("niederreiter", 100_000)) == pytest.approx(0.5, abs=1e-4)


@pytest.mark.parametrize("engine", ["weyl", "niederreiter"])
def test_low_discrepancy_nodes_unique_in_unit_interval(engine):
    x = quadrature_nodes(QuadratureConfig(engine, 1_000_000))
    assert x.min() >= 0.0 and x.max() < 1.0
    assert np.unique(x).size == x.size


@pytest.mark.parametrize("engine", ["trapezoid", "simpson", "weyl", "niederreiter", "pseudo_mc"])
def test_worker_count_does_not_change_result(engine, benchmark_fit):
    cfg = QuadratureConfig(engine, 1_000_000, seed=5)
    f = tail_integrand(benchmark_fit)
    ref = integrate(f, cfg, workers=1)
    for w in (2, 3, 8):
        assert integrate(f, cfg, workers=w) == ref


def test_pseudo_mc_seeded():
    f = lambda x: np.exp(x)  # noqa: E731
    a = integrate(f, QuadratureConfig("pseudo_mc", 5000, seed=11))
    assert a == integrate(f, QuadratureConfig("pseudo_mc", 5000, seed=11))
    assert a != integrate(f, QuadratureConfig("pseudo_mc", 5000, seed=12))


def test_pseudo_mc_three_sigma(benchmark_fit):
    f = tail_integrand(benchmark_fit)
    baseline = integrate(f, QuadratureConfig("trapezoid", 20_000_000), workers=4)
    est = np.array([integrate(f, QuadratureConfig("pseudo_mc", 20_000, seed=s)) for s in range(100)])
    assert abs(est.mean() - baseline) <= 3 * est.std(ddof=1) / math.sqrt(100)


def test_non_finite_integrand_names_node():
    with pytest.raises(DomainError, match="p=0.5"):
        integrate(lambda x: np.where(x == 0.5, np.nan, x), QuadratureConfig("trapezoid", 10))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3000), st.floats(-5, 5), st.floats(-5, 5))
def test_trapezoid_exact_for_lines_on_closed_grid(N, a, b):
    val = integrate(lambda x: a * x + b, QuadratureConfig("trapezoid", N, grid="closed"))
    assert val == pytest.approx(a / 2 + b, abs=1e-10)


def test_bench_self_comparison(benchmark_fit):
    table = bench_errors(benchmark_fit, 100, ["trapezoid"], [200_000], baseline_slices=200_000)
    assert table.errors["trapezoid"] == [0.0]


def test_bench_pseudo_reports_spread(benchmark_fit):
    table = bench_errors(benchmark_fit, 100, ["pseudo_mc"], [1000], baseline_slices=100_000,
                         pseudo_samples=20)
    assert table.errors["pseudo_mc"][0] > 0


def test_bench_csv(tmp_path):
    t = BenchTable(4.5, [10, 100], {"trapezoid": [-1.234, -0.0001]})
    path = tmp_path / "t5.csv"
    t.to_csv(path)
    assert path.read_text().splitlines() == ["engine,10,100", "trapezoid,-1.23,0.00"]


def test_baseline_value(bench_table):
    assert bench_table.baseline == pytest.approx(4.595, abs=5e-4)


@pytest.mark.parametrize("engine", ["trapezoid", "simpson"])
def test_newton_cotes_errors_negative_and_shrinking(bench_table, engine):
    errs = np.array(bench_table.errors[engine])
    assert np.all(errs < 0)
    assert np.all(np.diff(np.abs(errs)) < 0)


def test_engines_agree_at_ten_million(bench_table):
    for engine, errs in bench_table.errors.items():
        assert abs(errs[-1]) < 0.1, engine


# one pseudo-MC draw at N = 1e7 has a spread of about 0.25% on this integrand
@pytest.mark.xfail(reason="pseudo-MC sampling spread at N=1e7 exceeds 0.1%", strict=True)
def test_pseudo_mc_agrees_at_ten_million(bench_table, benchmark_fit):
    pmc = integrate(tail_integrand(benchmark_fit), QuadratureConfig("pseudo_mc", 10_000_000, seed=0), workers=4)
    assert abs(pmc / bench_table.baseline - 1) < 1e-3


def test_bench_csv_trapezoid_cell(bench_table, tmp_path):
    bench_table.to_csv(tmp_path / "tables5.csv")
    rows = [line.split(",") for line in (tmp_path / "tables5.csv").read_text().splitlines()]
    trap = next(r for r in rows if r[0] == "trapezoid")
    assert trap[rows[0].index("10000000")] == "0.00"
