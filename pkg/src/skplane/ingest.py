"""Daily value CSV parsing, return computation, and weekly partitioning.

The pipeline starts from rows of (symbol, date, positive value), turns each
symbol's value series into day-over-day returns, and groups the returns into
ISO-8601 calendar weeks (Monday-Sunday).  Weeks shorter than ``min_days``
returns are dropped and counted per symbol.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Literal

from .errors import (
    DuplicateKey,
    InsufficientData,
    MalformedRow,
    MissingColumn,
    NonPositiveValue,
)

__all__ = [
    "CsvSchema",
    "Observation",
    "ReturnSeries",
    "WeekWindow",
    "RawPanel",
    "PanelReport",
    "parse_observations",
    "render_observations_csv",
    "compute_returns",
    "assemble_panel",
]

ReturnMethod = Literal["simple", "log"]


@dataclass(frozen=True)
class CsvSchema:
    """Column names of the input CSV; the value column defaults to market cap."""

    date_col: str = "date"
    symbol_col: str = "symbol"
    value_col: str = "mcap"


@dataclass(frozen=True, order=True)
class Observation:
    """One (symbol, date, value) row; value is positive and asset-native."""

    symbol: str
    date: dt.date
    value: float


@dataclass(frozen=True)
class ReturnSeries:
    """Day-over-day returns for one symbol; dates[i] is the day of returns[i]."""

    symbol: str
    dates: tuple[dt.date, ...]
    returns: tuple[float, ...]


@dataclass(frozen=True)
class WeekWindow:
    """Returns of one symbol inside one ISO calendar week."""

    symbol: str
    week_id: str
    week_start: dt.date
    returns: tuple[float, ...]


@dataclass(frozen=True)
class RawPanel:
    """Weekly return windows, unique per (symbol, week_id)."""

    windows: tuple[WeekWindow, ...]


@dataclass
class PanelReport:
    """Per-symbol counts of windows and returns dropped at assembly."""

    dropped_windows: dict[str, int] = field(default_factory=dict)
    dropped_returns: dict[str, int] = field(default_factory=dict)


def _decode(raw: bytes | str | IO) -> io.StringIO:
    if isinstance(raw, bytes):
        return io.StringIO(raw.decode("utf-8"))
    if isinstance(raw, str):
        return io.StringIO(raw)
    data = raw.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return io.StringIO(data)


def parse_observations(raw_csv: bytes | str | IO, schema: CsvSchema | None = None) -> list[Observation]:
    """Parse a UTF-8 CSV byte stream into Observations sorted by (symbol, date).

    Duplicated (symbol, date) pairs are an error, never silently deduplicated.
    Raises MissingColumn, MalformedRow (with the 1-based row number), or
    DuplicateKey.
    """
    schema = schema or CsvSchema()
    reader = csv.reader(_decode(raw_csv))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn("input CSV is empty, no header row") from None
    header = [h.strip() for h in header]
    try:
        i_date = header.index(schema.date_col)
        i_sym = header.index(schema.symbol_col)
        i_val = header.index(schema.value_col)
    except ValueError:
        wanted = (schema.date_col, schema.symbol_col, schema.value_col)
        missing = [c for c in wanted if c not in header]
        raise MissingColumn(f"missing column(s) {missing}; header has {header}") from None

    out: list[Observation] = []
    seen: set[tuple[str, dt.date]] = set()
    for row_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and row[0].strip() == ""):
            continue
        if len(row) != len(header):
            raise MalformedRow(row_no, f"expected {len(header)} fields, got {len(row)}")
        symbol = row[i_sym].strip()
        if not symbol:
            raise MalformedRow(row_no, "empty symbol")
        try:
            date = dt.date.fromisoformat(row[i_date].strip())
        except ValueError:
            raise MalformedRow(row_no, f"unparseable date {row[i_date]!r}") from None
        try:
            value = float(row[i_val])
        except ValueError:
            raise MalformedRow(row_no, f"unparseable value {row[i_val]!r}") from None
        if not math.isfinite(value) or value <= 0.0:
            raise MalformedRow(row_no, f"value must be a positive finite number, got {row[i_val]!r}")
        key = (symbol, date)
        if key in seen:
            raise DuplicateKey(f"duplicate (symbol, date) = ({symbol}, {date.isoformat()})")
        seen.add(key)
        out.append(Observation(symbol, date, value))
    out.sort()
    return out


def render_observations_csv(observations: Iterable[Observation], schema: CsvSchema | None = None) -> bytes:
    """Emit the canonical CSV form; 17 significant digits round-trip float64."""
    schema = schema or CsvSchema()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([schema.date_col, schema.symbol_col, schema.value_col])
    for obs in observations:
        writer.writerow([obs.date.isoformat(), obs.symbol, format(obs.value, ".17g")])
    return buf.getvalue().encode("utf-8")


def compute_returns(observations: list[Observation], method: ReturnMethod = "simple") -> ReturnSeries:
    """Day-over-day returns for one symbol's observations (already date-sorted).

    simple: r_t = v_t / v_{t-1} - 1;  log: r_t = ln(v_t / v_{t-1}).
    """
    if len(observations) < 2:
        raise InsufficientData(f"need >= 2 observations, got {len(observations)}")
    symbols = {o.symbol for o in observations}
    if len(symbols) != 1:
        raise ValueError(f"observations span multiple symbols: {sorted(symbols)}")
    if method not in ("simple", "log"):
        raise ValueError(f"unknown return method {method!r}")
    for o in observations:
        if not (o.value > 0.0) or not math.isfinite(o.value):
            raise NonPositiveValue(f"{o.symbol} {o.date.isoformat()}: value {o.value}")
    dates = []
    returns = []
    for prev, cur in zip(observations, observations[1:]):
        if cur.date <= prev.date:
            raise ValueError(f"dates not strictly increasing at {cur.date.isoformat()}")
        ratio = cur.value / prev.value
        returns.append(ratio - 1.0 if method == "simple" else math.log(ratio))
        dates.append(cur.date)
    return ReturnSeries(observations[0].symbol, tuple(dates), tuple(returns))


def iso_week_id(date: dt.date) -> str:
    year, week, _ = date.isocalendar()
    return f"{year:04d}-W{week:02d}"


def iso_week_start(date: dt.date) -> dt.date:
    return date - dt.timedelta(days=date.isoweekday() - 1)


def assemble_panel(series: Iterable[ReturnSeries], min_days: int = 5) -> tuple[RawPanel, PanelReport]:
    """Group returns by ISO calendar week, dropping windows shorter than min_days.

    Dropped windows and their return counts are tallied per symbol in the
    report; kept windows satisfy min_days <= length <= 7.
    """
    if not 2 <= min_days <= 7:
        raise ValueError(f"min_days must be in [2, 7], got {min_days}")
    windows: list[WeekWindow] = []
    report = PanelReport()
    for s in series:
        by_week: dict[dt.date, list[float]] = {}
        for date, ret in zip(s.dates, s.returns):
            by_week.setdefault(iso_week_start(date), []).append(ret)
        for week_start in sorted(by_week):
            rets = by_week[week_start]
            if len(rets) < min_days:
                report.dropped_windows[s.symbol] = report.dropped_windows.get(s.symbol, 0) + 1
                report.dropped_returns[s.symbol] = report.dropped_returns.get(s.symbol, 0) + len(rets)
                continue
            windows.append(WeekWindow(s.symbol, iso_week_id(week_start), week_start, tuple(rets)))
    windows.sort(key=lambda w: (w.symbol, w.week_id))
    return RawPanel(tuple(windows)), report
