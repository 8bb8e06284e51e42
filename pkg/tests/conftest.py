import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tailmargin.fixtures import BENCHMARK_FIT, FIXTURES  # noqa: E402

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def bench_table():
    """Quadrature error table on the benchmark tail, shared across modules."""
    from reference_values import BENCH_SLICES
    from tailmargin.quadrature import bench_errors

    t0 = time.perf_counter()
    table = bench_errors(BENCHMARK_FIT, 100, ("trapezoid", "simpson", "niederreiter", "weyl"),
                         BENCH_SLICES, workers=4)
    table.elapsed = time.perf_counter() - t0
    return table


@pytest.fixture(scope="session")
def boot_all():
    """B=5000 bootstrap of every published measure on every fixture, seed 0."""
    from reference_values import ALPHAS, RS
    from tailmargin.bootstrap import BootstrapConfig, boot_many
    from tailmargin.risk_measures import RiskMeasureSpec

    specs = ([RiskMeasureSpec.var(a) for a in ALPHAS] + [RiskMeasureSpec.es(a) for a in ALPHAS]
             + [RiskMeasureSpec.srm(R) for R in RS])
    cfg = BootstrapConfig(5000, seed=0, workers=4)
    t0 = time.perf_counter()
    out = {}
    for key, fit in FIXTURES.items():
        for spec, s in zip(specs, boot_many(fit, specs, cfg)):
            out[(*key, spec.kind, spec.param)] = s
    out["elapsed"] = time.perf_counter() - t0
    return out


@pytest.fixture
def sp_long():
    return FIXTURES[("S&P500", "long")]


@pytest.fixture
def benchmark_fit():
    return BENCHMARK_FIT


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (len(k), k)):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
