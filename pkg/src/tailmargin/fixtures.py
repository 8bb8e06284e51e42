"""Published GPD tail fits for five index futures, long and short.

Values are daily % losses over 3392 daily returns, to two decimals.
"""

from __future__ import annotations

from tailmargin.errors import InputError
from tailmargin.gpd import GpdFit

SAMPLE_SIZE = 3392
CONTRACTS = ("S&P500", "FTSE100", "DAX", "Hang Seng", "Nikkei 225")
POSITIONS = ("long", "short")

# contract -> position -> (u, N_u, xi, se_xi, beta, se_beta)
_TABLE = {
    "S&P500": {"long": (2.00, 130, 0.18, 0.10, 0.60, 0.08),
               "short": (2.00, 118, 0.13, 0.15, 0.76, 0.13)},
    "FTSE100": {"long": (1.50, 250, 0.10, 0.08, 0.71, 0.07),
                "short": (1.50, 276, 0.02, 0.07, 0.73, 0.07)},
    "DAX": {"long": (2.00, 235, 0.01, 0.05, 1.19, 0.10),
            "short": (2.00, 237, 0.05, 0.07, 1.00, 0.10)},
    "Hang Seng": {"long": (2.00, 353, 0.13, 0.06, 1.18, 0.10),
                  "short": (2.00, 367, 0.14, 0.05, 1.15, 0.09)},
    "Nikkei 225": {"long": (2.00, 277, -0.01, 0.06, 0.89, 0.07),
                   "short": (2.00, 255, -0.07, 0.05, 1.04, 0.08)},
}


def _make(contract: str, position: str) -> GpdFit:
    u, n_u, xi, se_xi, beta, se_beta = _TABLE[contract][position]
    return GpdFit(xi=xi, beta=beta, u=u, n=SAMPLE_SIZE, n_u=n_u, se_xi=se_xi,
                  se_beta=se_beta, label=f"{contract}:{position}")


FIXTURES: dict[tuple[str, str], GpdFit] = {
    (c, p): _make(c, p) for c in CONTRACTS for p in POSITIONS
}

# mean of the five long-position fits; the quadrature benchmark case
BENCHMARK_FIT = GpdFit(xi=0.082, beta=0.914, u=1.9, n=SAMPLE_SIZE, n_u=249, label="benchmark")

_ALIASES = {
    "sp500": "S&P500", "s&p500": "S&P500", "spx": "S&P500", "s&p": "S&P500",
    "ftse100": "FTSE100", "ftse": "FTSE100",
    "dax": "DAX",
    "hangseng": "Hang Seng", "hsi": "Hang Seng",
    "nikkei225": "Nikkei 225", "nikkei": "Nikkei 225",
}


def get_fixture(name: str) -> GpdFit:
    """Look up ``"CONTRACT:position"`` (e.g. ``"sp500:long"``) or ``"benchmark"``."""
    key = name.strip()
    if key.lower() == "benchmark":
        return BENCHMARK_FIT
    contract, _, position = key.rpartition(":")
    if not contract:
        contract, position = key, "long"
    canon = _ALIASES.get(contract.lower().replace(" ", ""), contract)
    position = position.strip().lower()
    try:
        return FIXTURES[(canon, position)]
    except KeyError:
        raise InputError(
            f"unknown fixture {name!r}; use CONTRACT:POSITION with CONTRACT in {CONTRACTS}"
        ) from None
