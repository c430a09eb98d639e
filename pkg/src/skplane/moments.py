"""Per-window skewness, kurtosis, the extreme-gap factor, and summary stats.

Skewness and kurtosis use population (1/N) normalisation; kurtosis is
non-excess (a normal sample sits near 3).  The delta factor is the gap
between the two largest absolute deviations of a window, in units of the
window's population standard deviation: large delta means a single extreme
day dominated the week.  Its natural log is banded into three regimes at 0
and 2.3.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DuplicateKey, EmptyInput, TooShort, ZeroVariance
from .ingest import RawPanel

__all__ = [
    "DEFAULT_COVID_CUTOFF",
    "DeltaRegime",
    "MomentRecord",
    "MomentPanel",
    "Stats",
    "skewness",
    "kurtosis",
    "delta",
    "delta_regime",
    "weekly_moments",
    "descriptive_stats",
    "render_panel_csv",
    "read_panel_csv",
]

DEFAULT_COVID_CUTOFF = dt.date(2019, 12, 31)

LN_DELTA_GAUSSIAN_MAX = 0.0
LN_DELTA_EXTREME_MIN = 2.3


class DeltaRegime(enum.Enum):
    GAUSSIAN = "gaussian"
    INTERMEDIATE = "intermediate"
    EXTREME_DOMINATED = "extreme_dominated"


@dataclass(frozen=True)
class MomentRecord:
    """Weekly moments of one symbol: S, K, delta, window length, era dummy."""

    symbol: str
    week_id: str
    week_start: dt.date
    n_days: int
    skewness: float
    kurtosis: float
    delta: float
    ln_delta: float
    covid: int


@dataclass(frozen=True)
class MomentPanel:
    """Moment records sorted by (symbol, week_id), unique per pair."""

    records: tuple[MomentRecord, ...]

    def __post_init__(self):
        keys = [(r.symbol, r.week_id) for r in self.records]
        if keys != sorted(keys):
            raise ValueError("records must be sorted by (symbol, week_id)")
        if len(set(keys)) != len(keys):
            raise DuplicateKey("duplicate (symbol, week_id) in moment panel")

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class Stats:
    """Summary row: count, mean, sample sd, extremes, and five percentiles."""

    n: int
    mean: float
    sd: float
    min: float
    max: float
    p1: float
    p25: float
    p50: float
    p75: float
    p99: float


def _validated_window(window: Sequence[float]) -> np.ndarray:
    arr = np.asarray(window, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 3:
        raise TooShort(f"window needs >= 3 values, got {arr.size}")
    if arr.min() == arr.max():
        raise ZeroVariance("all window values are equal")
    return arr


def _single(window: Sequence[float]) -> tuple[float, float, float]:
    arr = _validated_window(window)
    s, k, d, _ = kernels.batch_moments(arr[None, :], np.array([arr.size]))
    return float(s[0]), float(k[0]), float(d[0])


def skewness(window: Sequence[float]) -> float:
    """Third standardized moment of the window, 1/N normalisation."""
    return _single(window)[0]


def kurtosis(window: Sequence[float]) -> float:
    """Fourth standardized moment of the window, 1/N normalisation, non-excess."""
    return _single(window)[1]


def delta(window: Sequence[float]) -> float:
    """Gap between the two largest |deviations|, in population-sd units (>= 0)."""
    return _single(window)[2]


def delta_regime(ln_delta: float) -> DeltaRegime:
    """Band ln(delta): < 0 Gaussian, > 2.3 extreme-dominated, else intermediate.

    Both boundaries belong to the intermediate band.
    """
    if not math.isfinite(ln_delta):
        raise ValueError(f"ln_delta must be finite, got {ln_delta}")
    if ln_delta < LN_DELTA_GAUSSIAN_MAX:
        return DeltaRegime.GAUSSIAN
    if ln_delta > LN_DELTA_EXTREME_MIN:
        return DeltaRegime.EXTREME_DOMINATED
    return DeltaRegime.INTERMEDIATE


def weekly_moments(
    panel: RawPanel, covid_cutoff: dt.date = DEFAULT_COVID_CUTOFF
) -> tuple[MomentPanel, dict[str, int]]:
    """One MomentRecord per computable window; zero-variance windows are dropped.

    Returns the panel plus per-symbol zero-variance drop counts.  The era
    dummy is 1 exactly when week_start falls after the cutoff, so the week
    straddling the cutoff stays in the pre era.
    """
    win, lengths = kernels.pad_windows([w.returns for w in panel.windows])
    skew, kurt, dlt, zero_var = kernels.batch_moments(win, lengths)

    records: list[MomentRecord] = []
    dropped: dict[str, int] = {}
    for i, w in enumerate(panel.windows):
        if zero_var[i]:
            dropped[w.symbol] = dropped.get(w.symbol, 0) + 1
            continue
        d = float(dlt[i])
        ln_d = math.log(d) if d > 0.0 else -math.inf
        records.append(
            MomentRecord(
                symbol=w.symbol,
                week_id=w.week_id,
                week_start=w.week_start,
                n_days=len(w.returns),
                skewness=float(skew[i]),
                kurtosis=float(kurt[i]),
                delta=d,
                ln_delta=ln_d,
                covid=1 if w.week_start > covid_cutoff else 0,
            )
        )
    records.sort(key=lambda r: (r.symbol, r.week_id))
    return MomentPanel(tuple(records)), dropped


def descriptive_stats(values: Sequence[float]) -> Stats:
    """Mean, (n-1)-denominator sd, min/max, and linearly interpolated percentiles.

    A single value yields sd = 0 by convention.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("descriptive_stats needs at least one value")
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    p1, p25, p50, p75, p99 = (
        float(q) for q in np.percentile(arr, [1, 25, 50, 75, 99], method="linear")
    )
    return Stats(
        n=int(arr.size),
        mean=float(arr.mean()),
        sd=sd,
        min=float(arr.min()),
        max=float(arr.max()),
        p1=p1,
        p25=p25,
        p50=p50,
        p75=p75,
        p99=p99,
    )


# -- CSV export / import -----------------------------------------------------

PANEL_CSV_COLUMNS = (
    "symbol",
    "week_id",
    "week_start",
    "n_days",
    "skewness",
    "kurtosis",
    "delta",
    "ln_delta",
    "covid",
)


def _g17(x: float) -> str:
    return format(x, ".17g")


def render_panel_csv(panel: MomentPanel) -> str:
    """Serialize a MomentPanel; floats carry 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PANEL_CSV_COLUMNS)
    for r in panel.records:
        writer.writerow(
            [
                r.symbol,
                r.week_id,
                r.week_start.isoformat(),
                r.n_days,
                _g17(r.skewness),
                _g17(r.kurtosis),
                _g17(r.delta),
                _g17(r.ln_delta),
                r.covid,
            ]
        )
    return buf.getvalue()


def read_panel_csv(source: str | IO) -> MomentPanel:
    """Parse a panel CSV produced by render_panel_csv (bit-exact floats)."""
    text = source if isinstance(source, str) else source.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != PANEL_CSV_COLUMNS:
        raise ValueError(f"unexpected panel CSV header: {header}")
    records = []
    for row in reader:
        if not row:
            continue
        records.append(
            MomentRecord(
                symbol=row[0],
                week_id=row[1],
                week_start=dt.date.fromisoformat(row[2]),
                n_days=int(row[3]),
                skewness=float(row[4]),
                kurtosis=float(row[5]),
                delta=float(row[6]),
                ln_delta=float(row[7]),
                covid=int(row[8]),
            )
        )
    return MomentPanel(tuple(records))


def panel_values(panel: MomentPanel) -> dict[str, list[float]]:
    """Column vectors used by the descriptive report; delta only where positive."""
    return {
        "skewness": [r.skewness for r in panel.records],
        "kurtosis": [r.kurtosis for r in panel.records],
        "delta": [r.delta for r in panel.records if r.delta > 0.0],
    }


def iterate_windows(panel: RawPanel) -> Iterable[tuple[str, tuple[float, ...]]]:
    for w in panel.windows:
        yield w.symbol, w.returns
