"""Aggregate statistics over detected opportunities.

Path-length and profit histograms, plus the daily total-profit time series
with a linear trend fitted to log10(total + 1) against the day index.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date as Date
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .detector import KIND_LOOP
from .errors import ConfigurationError
from .optimizer import Opportunity

# decade bins from 1e-2 to 1e7 USD
DEFAULT_BIN_EDGES = tuple(10.0 ** k for k in range(-2, 8))

Bin = tuple[float, float]


@dataclass
class DailyReport:
    date: Date
    opportunities: list[Opportunity]
    total_profit_usd: float
    loop_count: int
    nonloop_count: int


def make_daily_report(day: Date, opportunities: list[Opportunity]) -> DailyReport:
    loops = sum(1 for o in opportunities if o.path.kind == KIND_LOOP)
    total = sum((o.profit_usd for o in opportunities if o.profit_usd is not None), 0.0)
    return DailyReport(
        date=day,
        opportunities=opportunities,
        total_profit_usd=total,
        loop_count=loops,
        nonloop_count=len(opportunities) - loops,
    )


def length_histogram(opportunities: Sequence[Opportunity]) -> dict[int, int]:
    """Swap count (token count - 1) -> number of opportunities."""
    hist: dict[int, int] = {}
    for o in opportunities:
        hist[o.path.n_swaps] = hist.get(o.path.n_swaps, 0) + 1
    return dict(sorted(hist.items()))


def profit_histogram(
    opportunities: Sequence[Opportunity],
    bin_edges: Sequence[float] = DEFAULT_BIN_EDGES,
) -> dict[Bin, int]:
    """USD profit histogram over left-closed right-open bins.

    Profits below the first edge land in an underflow bin, at or above the
    last edge in an overflow bin; both always appear so counts sum to the
    input size.  Every opportunity must carry a USD profit.
    """
    edges = list(bin_edges)
    if len(edges) < 2 or any(a >= b for a, b in zip(edges, edges[1:])):
        raise ConfigurationError("bin_edges must be strictly ascending with >= 2 entries")
    bins: list[Bin] = [(-math.inf, edges[0])]
    bins += list(zip(edges, edges[1:]))
    bins.append((edges[-1], math.inf))
    hist = {b: 0 for b in bins}
    for o in opportunities:
        if o.profit_usd is None:
            raise ValueError(f"opportunity without USD profit: {o.path.tokens}")
        for lo, hi in bins:
            if lo <= o.profit_usd < hi:
                hist[(lo, hi)] += 1
                break
    return hist


def profit_timeseries(
    reports: Sequence[DailyReport],
) -> tuple[list[tuple[Date, float]], float | None]:
    """Daily totals in date order plus the trend slope.

    The slope is an ordinary least-squares fit of log10(total + 1) against
    the day index (days since the first date); None with fewer than 2 days.
    """
    ordered = sorted(reports, key=lambda r: r.date)
    series = [(r.date, r.total_profit_usd) for r in ordered]
    if len(series) < 2:
        return series, None
    x = np.array([(day - series[0][0]).days for day, _ in series], dtype=float)
    y = np.array([math.log10(total + 1.0) for _, total in series])
    slope = float(np.polyfit(x, y, 1)[0])
    return series, slope


def _open_out(out: str | Path | TextIO):
    if isinstance(out, (str, Path)):
        return open(out, "w", encoding="utf-8", newline=""), True
    return out, False


def write_length_csv(hist: dict[int, int], out: str | Path | TextIO) -> None:
    fh, own = _open_out(out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["length", "count"])
        for length in sorted(hist):
            writer.writerow([length, hist[length]])
    finally:
        if own:
            fh.close()


def write_profit_csv(hist: dict[Bin, int], out: str | Path | TextIO) -> None:
    fh, own = _open_out(out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_low", "bin_high", "count"])
        for lo, hi in sorted(hist):
            writer.writerow([repr(lo), repr(hi), hist[(lo, hi)]])
    finally:
        if own:
            fh.close()


def write_timeseries_csv(series: list[tuple[Date, float]], out: str | Path | TextIO) -> None:
    fh, own = _open_out(out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "total_profit_usd"])
        for day, total in series:
            writer.writerow([day.isoformat(), repr(total)])
    finally:
        if own:
            fh.close()
