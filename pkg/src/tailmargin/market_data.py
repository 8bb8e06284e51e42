"""Price ingestion and conversion to daily percentage losses.

Returns are 100 * log price relatives, so thresholds and risk figures are
all in "daily %" units. Losses carry a positive sign: a long position loses
when the return is negative, a short position when it is positive.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from tailmargin.errors import InputError

Position = Literal["long", "short"]
POSITIONS = ("long", "short")


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple[dt.date, ...]
    prices: np.ndarray

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        object.__setattr__(self, "prices", prices)
        if len(self.dates) != len(prices):
            raise InputError("dates and prices differ in length")
        bad = np.flatnonzero(~(prices > 0))
        if bad.size:
            raise InputError(f"non-positive price at row {bad[0] + 1}")
        for i in range(1, len(self.dates)):
            if self.dates[i] <= self.dates[i - 1]:
                raise InputError(f"dates not increasing at row {i + 1}")

    def __len__(self):
        return len(self.prices)


@dataclass(frozen=True)
class ReturnSeries:
    """Daily log returns in percent."""

    values: np.ndarray
    dates: tuple[dt.date, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class LossSeries:
    values: np.ndarray
    position: Position = "long"
    dates: tuple[dt.date, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.position not in POSITIONS:
            raise InputError(f"unknown position {self.position!r}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self):
        return len(self.values)


def _parse_date(text: str, row: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise InputError(f"unparseable date {text!r} at row {row}") from None


def _parse_float(text: str, row: int, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InputError(f"unparseable {what} {text!r} at row {row}") from None


def _read_table(path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input file not found: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise InputError(f"{path}: empty file")
    header = [h.strip().lower() for h in rows[0]]
    return header, rows[1:]


def _column_index(header: list[str], column: str | int | None, default: str) -> int:
    if column is None:
        column = default
    if isinstance(column, int) or (isinstance(column, str) and column.isdigit()):
        idx = int(column)
        if not 0 <= idx < len(header):
            raise InputError(f"column index {idx} out of range")
        return idx
    try:
        return header.index(column.strip().lower())
    except ValueError:
        raise InputError(f"missing column {column!r}; header is {header}") from None


def load_prices(
    path,
    column: str | int | None = "price",
    date_column: str | int = "date",
    ffill: bool = False,
) -> PriceSeries:
    """Read a ``date,price`` CSV into a validated :class:`PriceSeries`.

    ``column`` selects the price column by header name or 0-based index.
    Row numbers in error messages count data rows from 1. With ``ffill``,
    missing weekdays are padded with the previous price (zero return), the
    way the data vendor pads bank holidays.
    """
    header, rows = _read_table(path)
    di = _column_index(header, date_column, "date")
    pi = _column_index(header, column, "price")
    dates, prices = [], []
    for k, row in enumerate(rows, start=1):
        if len(row) <= max(di, pi):
            raise InputError(f"short row {k}")
        dates.append(_parse_date(row[di], k))
        prices.append(_parse_float(row[pi], k, "price"))
    series = PriceSeries(tuple(dates), np.array(prices))
    return pad_weekdays(series) if ffill else series


def pad_weekdays(prices: PriceSeries) -> PriceSeries:
    """Forward-fill every missing Monday-Friday between the first and last date."""
    if len(prices) < 2:
        return prices
    out_d, out_p = [prices.dates[0]], [prices.prices[0]]
    for d, p in zip(prices.dates[1:], prices.prices[1:]):
        day = out_d[-1] + dt.timedelta(days=1)
        while day < d:
            if day.weekday() < 5:
                out_d.append(day)
                out_p.append(out_p[-1])
            day += dt.timedelta(days=1)
        out_d.append(d)
        out_p.append(p)
    return PriceSeries(tuple(out_d), np.array(out_p))


def compute_returns(prices: PriceSeries) -> ReturnSeries:
    if len(prices) < 2:
        raise InputError("insufficient data: need at least 2 prices")
    r = 100.0 * np.diff(np.log(prices.prices))
    return ReturnSeries(r, prices.dates[1:])


def to_losses(returns: ReturnSeries | Sequence[float], position: Position) -> LossSeries:
    if isinstance(returns, ReturnSeries):
        values, dates = returns.values, returns.dates
    else:
        values, dates = np.asarray(returns, dtype=float), None
    if position == "long":
        return LossSeries(-values, "long", dates)
    if position == "short":
        return LossSeries(values.copy(), "short", dates)
    raise InputError(f"unknown position {position!r}")


def load_returns(path, column: str | int | None = None, ffill: bool = False) -> ReturnSeries:
    """Load either a price file or a return file, detected from the header.

    A ``return`` column is taken as daily % returns as-is; otherwise prices
    are read and differenced.
    """
    header, _ = _read_table(path)
    if column is None and "return" in header:
        return _load_return_column(path, "return")
    if column is not None and str(column).lower() == "return":
        return _load_return_column(path, "return")
    return compute_returns(load_prices(path, column=column, ffill=ffill))


def _load_return_column(path, column) -> ReturnSeries:
    header, rows = _read_table(path)
    ri = _column_index(header, column, "return")
    di = header.index("date") if "date" in header else None
    values, dates = [], []
    for k, row in enumerate(rows, start=1):
        values.append(_parse_float(row[ri], k, "return"))
        if di is not None:
            dates.append(_parse_date(row[di], k))
    if dates:
        for i in range(1, len(dates)):
            if dates[i] <= dates[i - 1]:
                raise InputError(f"dates not increasing at row {i + 1}")
    return ReturnSeries(np.array(values), tuple(dates) if dates else None)


def write_series(series: ReturnSeries | LossSeries, path) -> Path:
    """Write a series as CSV or JSON records depending on the file suffix."""
    path = Path(path)
    name = "loss" if isinstance(series, LossSeries) else "return"
    dates = series.dates or (None,) * len(series)
    records = [
        {"date": d.isoformat() if d else None, name: float(v)}
        for d, v in zip(dates, series.values)
    ]
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(records, indent=1))
    else:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["date", name])
            for rec in records:
                w.writerow([rec["date"] or "", repr(rec[name])])
    return path
