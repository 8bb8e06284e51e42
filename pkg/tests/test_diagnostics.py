import numpy as np
import pytest
from scipy import stats

from tailmargin.diagnostics import DiagnosticCurve, mean_excess, parse_grid, qq_normal, shape_stability
from tailmargin.errors import InputError
from tailmargin.gpd import GpdParams, fit_gpd_mle, gpd_quantile


def gpd_sample(xi, beta, size, seed):
    return gpd_quantile(np.random.default_rng(seed).random(size), GpdParams(xi, beta))


def test_curve_requires_increasing_x():
    with pytest.raises(ValueError):
        DiagnosticCurve([1.0, 1.0], [0.0, 1.0], "mean_excess")


def test_curve_csv(tmp_path):
    path = DiagnosticCurve([1.0, 2.5], [0.5, 0.25], "mean_excess").to_csv(tmp_path / "c.csv")
    assert path.read_text().splitlines() == ["# kind=mean_excess", "x,y", "1.0,0.5", "2.5,0.25"]


def test_qq_normal_on_normal_sample():
    x = np.random.default_rng(1).standard_normal(10_000)
    c = qq_normal(x)
    assert len(c) == 10_000
    assert np.all(np.diff(c.y) >= 0)
    central = slice(100, 9900)
    assert np.max(np.abs(c.y[central] - c.x[central])) < 0.1


def test_qq_normal_heavy_tail_above_line():
    c = qq_normal(gpd_sample(0.3, 1.0, 5000, 2))
    top = slice(int(0.99 * len(c)), None)
    assert np.all(c.y[top] > c.x[top])


def test_qq_normal_errors():
    with pytest.raises(InputError):
        qq_normal(np.arange(5.0))
    with pytest.raises(InputError, match="variance"):
        qq_normal(np.ones(20))


def test_mean_excess_arithmetic():
    c = mean_excess([3.0, 4.0, 5.0], [2.0], min_exceedances=1)
    assert c.points == [(2.0, 2.0)]


def test_mean_excess_exponential_is_flat():
    x = np.random.default_rng(3).exponential(1.5, 50_000)
    c = mean_excess(x, np.linspace(0, 4, 9))
    np.testing.assert_allclose(c.y, 1.5, rtol=0.05)
    assert np.all(c.y >= 0)


def test_mean_excess_slope_matches_shape():
    xi, beta = 0.2, 1.0
    x = gpd_sample(xi, beta, 20_000, 4)
    fit = fit_gpd_mle(x)
    grid = np.linspace(0, np.quantile(x, 0.9), 15)
    c = mean_excess(x, grid)
    slope = np.polyfit(c.x, c.y, 1)[0]
    target = fit.xi / (1 - fit.xi)
    se = fit.se_xi / (1 - fit.xi) ** 2
    assert slope > 0
    assert abs(slope - target) < 3 * se


def test_mean_excess_omits_thin_thresholds():
    with pytest.warns(UserWarning, match="omitted"):
        c = mean_excess(np.arange(1.0, 21.0), [0.0, 18.0, 100.0])
    assert c.x.tolist() == [0.0]


def test_shape_stability_recovers_shape():
    x = gpd_sample(0.2, 1.0, 8000, 5)
    grid = [0.0, 0.5, 1.0, 2.0]
    c = shape_stability(x, grid)
    assert len(c) == 4
    for u, xi_hat in zip(sorted(grid, reverse=True), c.y):
        exc = x[x > u] - u
        fit = fit_gpd_mle(exc, u=u, n=x.size)
        assert xi_hat == fit.xi
        assert abs(xi_hat - 0.2) < 3 * fit.se_xi
    # x axis is the exceedance count
    assert c.x.tolist() == sorted(float((x > u).sum()) for u in grid)


def test_shape_stability_single_and_empty():
    x = gpd_sample(0.1, 1.0, 2000, 6)
    assert len(shape_stability(x, [0.5])) == 1
    with pytest.warns(UserWarning, match="omitted"):
        c = shape_stability(x, [0.5, x.max() + 1])
    assert len(c) == 1


def test_shape_stability_workers_agree():
    x = gpd_sample(0.1, 1.0, 3000, 7)
    grid = np.linspace(0, 2, 6)
    a = shape_stability(x, grid)
    b = shape_stability(x, grid, workers=3)
    np.testing.assert_array_equal(a.y, b.y)


def test_parse_grid():
    np.testing.assert_allclose(parse_grid("1:2:0.25"), [1, 1.25, 1.5, 1.75, 2])
    np.testing.assert_allclose(parse_grid("1.5, 2"), [1.5, 2])
    with pytest.raises(InputError):
        parse_grid("a:b")
