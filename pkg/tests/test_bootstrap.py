import numpy as np
import pytest

from reference_values import ALPHAS, RS
from tailmargin.bootstrap import (
    BootstrapConfig,
    BootstrapSummary,
    boot_risk,
    ci_ranks,
    resample_estimates,
    resample_quantiles,
    summary_record,
    write_records,
)
from tailmargin.errors import InputError
from tailmargin.fixtures import FIXTURES
from tailmargin.gpd import GpdFit, gpd_cdf
from tailmargin.risk_measures import RiskMeasureSpec

SPECS = [RiskMeasureSpec.var(0.99), RiskMeasureSpec.es(0.995), RiskMeasureSpec.srm(100)]


def test_ci_ranks():
    assert ci_ranks(5000, 0.90) == (250, 4750)
    assert ci_ranks(1000, 0.95) == (25, 975)


def test_config_validation():
    with pytest.raises(InputError, match="too few"):
        BootstrapConfig(resamples=10, ci_level=0.90)
    with pytest.raises(InputError):
        BootstrapConfig(ci_level=1.0)
    with pytest.raises(InputError):
        BootstrapConfig(srm_estimator="kernel")


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_resample_is_sorted(sp_long, seed):
    q = resample_quantiles(sp_long, np.random.default_rng(seed))
    assert q.size == sp_long.n
    assert np.all(np.diff(q) >= 0)


def test_resample_pooled_tail_matches_fit(sp_long):
    rng = np.random.default_rng(2024)
    pooled = np.concatenate([resample_quantiles(sp_long, rng) for _ in range(5000)])
    exc = np.sort(pooled[pooled > sp_long.u] - sp_long.u)
    cdf = gpd_cdf(exc, sp_long.params)
    k = np.arange(1, exc.size + 1)
    ks = max(np.max(k / exc.size - cdf), np.max(cdf - (k - 1) / exc.size))
    assert ks < 0.01


def test_deterministic_across_workers(sp_long):
    ref = resample_estimates(sp_long, SPECS, BootstrapConfig(400, seed=3, workers=1))
    for w in (2, 5):
        got = resample_estimates(sp_long, SPECS, BootstrapConfig(400, seed=3, workers=w))
        np.testing.assert_array_equal(got, ref)
    other = resample_estimates(sp_long, SPECS, BootstrapConfig(400, seed=4))
    assert not np.array_equal(other, ref)


def test_prefix_stable(sp_long):
    # resample j does not depend on the total count
    small = resample_estimates(sp_long, SPECS, BootstrapConfig(200, seed=3))
    big = resample_estimates(sp_long, SPECS, BootstrapConfig(400, seed=3))
    np.testing.assert_array_equal(big[:200], small)


def test_degenerate_scale_gives_zero_spread():
    fit = GpdFit(0.1, 1e-15, 2.0, 3392, 200)
    for spec in SPECS[:2]:
        s = boot_risk(fit, spec, BootstrapConfig(200))
        assert s.se == pytest.approx(0.0, abs=1e-12)
        assert s.ci_lo == pytest.approx(s.ci_hi, abs=1e-12)


def test_summary_invariants(sp_long):
    s = boot_risk(sp_long, RiskMeasureSpec.var(0.99), BootstrapConfig(1000, seed=1))
    assert s.ci_lo <= s.ci_hi and s.se > 0
    assert s.point == pytest.approx(2.912, abs=5e-4)
    assert s.std_ci_lo == pytest.approx(s.ci_lo / s.resample_mean)
    assert s.std_ci_lo <= s.point / s.resample_mean <= s.std_ci_hi


def test_summary_from_known_estimates():
    s = BootstrapSummary.from_estimates(1.0, np.arange(1, 101, dtype=float), 0.90)
    assert (s.ci_lo, s.ci_hi) == (5.0, 95.0)
    assert s.resample_mean == 50.5
    assert s.se == pytest.approx(np.std(np.arange(1, 101), ddof=1))


def test_cell_estimator_available(sp_long):
    s = boot_risk(sp_long, RiskMeasureSpec.srm(100), BootstrapConfig(200, srm_estimator="cell"))
    assert s.se > 0


def test_records_roundtrip(tmp_path, sp_long):
    s = boot_risk(sp_long, SPECS[0], BootstrapConfig(100))
    rec = summary_record("S&P500", "long", SPECS[0], s)
    csv_path = write_records([rec], tmp_path / "b.csv")
    assert csv_path.read_text().splitlines()[0].startswith("contract,position,measure,param,point,se")
    json_path = write_records([rec], tmp_path / "b.json")
    assert '"measure": "VaR"' in json_path.read_text()


@pytest.mark.parametrize("key", sorted(FIXTURES))
def test_spread_grows_with_conditioning_parameter(boot_all, key):
    for kind, params in (("VaR", ALPHAS), ("ES", ALPHAS), ("SRM", RS)):
        se = [boot_all[(*key, kind, k)].se for k in params]
        width = [boot_all[(*key, kind, k)].ci_hi - boot_all[(*key, kind, k)].ci_lo for k in params]
        assert np.all(np.diff(se) > 0), kind
        assert np.all(np.diff(width) > 0), kind


@pytest.mark.parametrize("key", sorted(FIXTURES))
def test_right_skewed_intervals(boot_all, key):
    for kind, k in (("VaR", 0.999), ("ES", 0.999), ("SRM", 200)):
        s = boot_all[(*key, kind, k)]
        assert s.std_ci_hi - 1 > 1 - s.std_ci_lo, kind


@pytest.mark.parametrize("key", sorted(FIXTURES))
def test_srm_intervals_wider_than_es(boot_all, key):
    srm = boot_all[(*key, "SRM", 100)]
    es = boot_all[(*key, "ES", 0.995)]
    assert srm.std_ci_hi - srm.std_ci_lo > es.std_ci_hi - es.std_ci_lo
