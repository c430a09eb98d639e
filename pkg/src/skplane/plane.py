"""Skewness-kurtosis plane bounds and plot-ready dataset exports.

Bound curves on the plane, lowest to highest at S = 0:

    pearson    K = S^2 + 1          (hard lower bound, any distribution)
    klaassen   K = S^2 + 186/125    (sharpened unimodal bound)
    powerlaw   K = N^(1/3) |S|^(4/3)  (single-extreme-event regime)
    quadratic  K = A S^2 + B        (fitted relationship)

Exports produce rows for external plotting tools; no rendering here.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass
from typing import IO

from .errors import EmptyPanel
from .moments import MomentPanel

__all__ = [
    "KLAASSEN_CONSTANT",
    "BOUND_FLAG_TOL",
    "pearson_lower_bound",
    "klaassen_lower_bound",
    "cristelli_power_law",
    "quadratic_curve",
    "BoundCurve",
    "PlanePoint",
    "PlaneDataset",
    "HeatmapRow",
    "export_plane",
    "export_heatmap",
]

KLAASSEN_CONSTANT = 186 / 125  # exactly 1.488 in decimal rendering
BOUND_FLAG_TOL = 1e-9

DEFAULT_S_RANGE = (-2.5, 2.5)
DEFAULT_S_STEP = 0.01
DEFAULT_POWER_LAW_N = 7


def pearson_lower_bound(s: float) -> float:
    """Hard kurtosis floor S^2 + 1."""
    return s * s + 1.0


def klaassen_lower_bound(s: float) -> float:
    """Unimodal kurtosis floor S^2 + 186/125."""
    return s * s + KLAASSEN_CONSTANT


def cristelli_power_law(s: float, n: int) -> float:
    """Extreme-event-regime curve N^(1/3) |S|^(4/3); |S| keeps both flanks real."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return n ** (1.0 / 3.0) * abs(s) ** (4.0 / 3.0)


def quadratic_curve(s: float, a: float, b: float) -> float:
    """Fitted plane relationship A*S^2 + B."""
    return a * s * s + b


@dataclass(frozen=True)
class BoundCurve:
    """A plane curve sampled on an S grid; params depend on the kind."""

    kind: str  # pearson | klaassen | quadratic | powerlaw
    params: tuple[float, ...] | None
    samples: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class PlanePoint:
    """One panel record placed on the plane with bound-satisfaction flags."""

    s: float
    k: float
    ln_delta: float
    week_index: int
    covid: int
    satisfies_pearson: bool
    satisfies_klaassen: bool


@dataclass(frozen=True)
class PlaneDataset:
    points: tuple[PlanePoint, ...]
    curves: tuple[BoundCurve, ...]
    pre: tuple[PlanePoint, ...]
    post: tuple[PlanePoint, ...]


@dataclass(frozen=True)
class HeatmapRow:
    s: float
    k: float
    ln_delta: float
    week_index: int
    symbol: str


def _grid(s_range: tuple[float, float], s_step: float) -> list[float]:
    lo, hi = s_range
    if s_step <= 0:
        raise ValueError(f"s_step must be > 0, got {s_step}")
    if hi < lo:
        raise ValueError(f"empty S range {s_range}")
    count = int(math.floor((hi - lo) / s_step + 0.5)) + 1
    return [lo + i * s_step for i in range(count)]


def _week_indices(panel: MomentPanel) -> list[int]:
    start = min(r.week_start for r in panel.records)
    return [(r.week_start - start).days // 7 for r in panel.records]


def export_plane(
    panel: MomentPanel,
    curve_params: tuple[float, float] | None = None,
    s_range: tuple[float, float] = DEFAULT_S_RANGE,
    s_step: float = DEFAULT_S_STEP,
    power_law_n: int = DEFAULT_POWER_LAW_N,
) -> PlaneDataset:
    """Scatter points, sampled bound curves, and the pre/post era split.

    The quadratic curve is emitted only when (A, B) params are supplied,
    normally from the fitted quadratic model.  Ordering is deterministic:
    points in panel order, curve samples by ascending S.
    """
    if len(panel.records) == 0:
        raise EmptyPanel("export_plane needs a non-empty panel")
    week_idx = _week_indices(panel)
    points = tuple(
        PlanePoint(
            s=r.skewness,
            k=r.kurtosis,
            ln_delta=r.ln_delta,
            week_index=wi,
            covid=r.covid,
            satisfies_pearson=r.kurtosis >= pearson_lower_bound(r.skewness) - BOUND_FLAG_TOL,
            satisfies_klaassen=r.kurtosis >= klaassen_lower_bound(r.skewness) - BOUND_FLAG_TOL,
        )
        for r, wi in zip(panel.records, week_idx)
    )
    grid = _grid(s_range, s_step)
    curves = [
        BoundCurve("pearson", None, tuple((s, pearson_lower_bound(s)) for s in grid)),
        BoundCurve("klaassen", None, tuple((s, klaassen_lower_bound(s)) for s in grid)),
    ]
    if curve_params is not None:
        a, b = curve_params
        curves.append(
            BoundCurve("quadratic", (a, b), tuple((s, quadratic_curve(s, a, b)) for s in grid))
        )
    curves.append(
        BoundCurve(
            "powerlaw",
            (float(power_law_n),),
            tuple((s, cristelli_power_law(s, power_law_n)) for s in grid),
        )
    )
    return PlaneDataset(
        points=points,
        curves=tuple(curves),
        pre=tuple(p for p in points if p.covid == 0),
        post=tuple(p for p in points if p.covid == 1),
    )


def export_heatmap(panel: MomentPanel) -> list[HeatmapRow]:
    """(S, K, ln_delta, week_index, symbol) rows, week_index since panel start."""
    if len(panel.records) == 0:
        raise EmptyPanel("export_heatmap needs a non-empty panel")
    week_idx = _week_indices(panel)
    rows = [
        HeatmapRow(r.skewness, r.kurtosis, r.ln_delta, wi, r.symbol)
        for r, wi in zip(panel.records, week_idx)
    ]
    rows.sort(key=lambda h: (h.week_index, h.symbol))
    return rows


# -- CSV rendering -----------------------------------------------------------

PLANE_CSV_COLUMNS = (
    "series",
    "S",
    "K",
    "ln_delta",
    "week_index",
    "covid",
    "satisfies_pearson",
    "satisfies_klaassen",
)
POINTS_CSV_COLUMNS = PLANE_CSV_COLUMNS[1:]
HEATMAP_CSV_COLUMNS = ("S", "K", "ln_delta", "week_index", "symbol")


def _g17(x: float) -> str:
    return format(x, ".17g")


def _point_fields(p: PlanePoint) -> list[str]:
    return [
        _g17(p.s),
        _g17(p.k),
        _g17(p.ln_delta),
        str(p.week_index),
        str(p.covid),
        str(int(p.satisfies_pearson)),
        str(int(p.satisfies_klaassen)),
    ]


def render_plane_csv(dataset: PlaneDataset) -> str:
    """One file: point rows first, then each curve, tagged by the series column."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PLANE_CSV_COLUMNS)
    for p in dataset.points:
        writer.writerow(["points"] + _point_fields(p))
    order = {"pearson": 0, "klaassen": 1, "quadratic": 2, "powerlaw": 3}
    for curve in sorted(dataset.curves, key=lambda c: order[c.kind]):
        for s, k in curve.samples:
            writer.writerow([curve.kind, _g17(s), _g17(k), "", "", "", "", ""])
    return buf.getvalue()


def render_points_csv(points: tuple[PlanePoint, ...]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(POINTS_CSV_COLUMNS)
    for p in points:
        writer.writerow(_point_fields(p))
    return buf.getvalue()


def render_heatmap_csv(rows: list[HeatmapRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEATMAP_CSV_COLUMNS)
    for h in rows:
        writer.writerow([_g17(h.s), _g17(h.k), _g17(h.ln_delta), str(h.week_index), h.symbol])
    return buf.getvalue()


def _text(source: str | IO) -> str:
    text = source if isinstance(source, str) else source.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return text


def read_plane_csv(source: str | IO) -> tuple[list[PlanePoint], dict[str, list[tuple[float, float]]]]:
    """Parse a plane CSV back into points and per-series curve samples."""
    reader = csv.reader(io.StringIO(_text(source)))
    header = next(reader)
    if tuple(header) != PLANE_CSV_COLUMNS:
        raise ValueError(f"unexpected plane CSV header: {header}")
    points: list[PlanePoint] = []
    curves: dict[str, list[tuple[float, float]]] = {}
    for row in reader:
        if not row:
            continue
        if row[0] == "points":
            points.append(
                PlanePoint(
                    s=float(row[1]),
                    k=float(row[2]),
                    ln_delta=float(row[3]),
                    week_index=int(row[4]),
                    covid=int(row[5]),
                    satisfies_pearson=bool(int(row[6])),
                    satisfies_klaassen=bool(int(row[7])),
                )
            )
        else:
            curves.setdefault(row[0], []).append((float(row[1]), float(row[2])))
    return points, curves


def read_points_csv(source: str | IO) -> list[PlanePoint]:
    reader = csv.reader(io.StringIO(_text(source)))
    header = next(reader)
    if tuple(header) != POINTS_CSV_COLUMNS:
        raise ValueError(f"unexpected points CSV header: {header}")
    return [
        PlanePoint(
            s=float(r[0]),
            k=float(r[1]),
            ln_delta=float(r[2]),
            week_index=int(r[3]),
            covid=int(r[4]),
            satisfies_pearson=bool(int(r[5])),
            satisfies_klaassen=bool(int(r[6])),
        )
        for r in reader
        if r
    ]


def read_heatmap_csv(source: str | IO) -> list[HeatmapRow]:
    reader = csv.reader(io.StringIO(_text(source)))
    header = next(reader)
    if tuple(header) != HEATMAP_CSV_COLUMNS:
        raise ValueError(f"unexpected heatmap CSV header: {header}")
    return [
        HeatmapRow(float(r[0]), float(r[1]), float(r[2]), int(r[3]), r[4])
        for r in reader
        if r
    ]
