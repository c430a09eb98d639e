import datetime as dt
import math

import numpy as np
import pytest

from skplane.errors import (
    DuplicateKey,
    InsufficientData,
    MalformedRow,
    MissingColumn,
    NonPositiveValue,
)
from skplane.ingest import (
    CsvSchema,
    Observation,
    assemble_panel,
    compute_returns,
    parse_observations,
    render_observations_csv,
)


def _obs(symbol, day_values, start=dt.date(2019, 4, 1)):
    return [
        Observation(symbol, start + dt.timedelta(days=i), v)
        for i, v in enumerate(day_values)
    ]


class TestParseObservations:
    def test_single_well_formed_row(self):
        out = parse_observations(b"date,symbol,mcap\n2019-04-01,BTC,90e9\n")
        assert out == [Observation("BTC", dt.date(2019, 4, 1), 9.0e10)]

    def test_rows_sorted_by_symbol_then_date(self):
        raw = (
            b"date,symbol,mcap\n"
            b"2019-04-02,ETH,2\n"
            b"2019-04-01,ETH,1\n"
            b"2019-04-01,BTC,3\n"
        )
        out = parse_observations(raw)
        assert [(o.symbol, o.date.day) for o in out] == [("BTC", 1), ("ETH", 1), ("ETH", 2)]

    def test_malformed_value_names_row(self):
        raw = b"date,symbol,mcap\n2019-04-01,BTC,1\n2019-04-02,BTC,abc\n"
        with pytest.raises(MalformedRow) as err:
            parse_observations(raw)
        assert err.value.row == 3

    def test_malformed_date(self):
        with pytest.raises(MalformedRow):
            parse_observations(b"date,symbol,mcap\nnot-a-date,BTC,1\n")

    def test_non_positive_value_is_malformed(self):
        with pytest.raises(MalformedRow):
            parse_observations(b"date,symbol,mcap\n2019-04-01,BTC,-5\n")

    def test_duplicate_key(self):
        raw = b"date,symbol,mcap\n2019-04-01,BTC,1\n2019-04-01,BTC,2\n"
        with pytest.raises(DuplicateKey):
            parse_observations(raw)

    def test_missing_column(self):
        with pytest.raises(MissingColumn):
            parse_observations(b"date,symbol\n2019-04-01,BTC\n")

    def test_custom_schema(self):
        schema = CsvSchema(date_col="day", symbol_col="asset", value_col="price")
        out = parse_observations(b"day,asset,price\n2020-01-06,DOGE,0.5\n", schema)
        assert out[0].value == 0.5

    def test_round_trip_is_bit_exact(self):
        rng = np.random.default_rng(99)
        obs = _obs("BTC", np.exp(rng.normal(0, 2, 50)) * 1e9)
        rendered = render_observations_csv(obs)
        again = parse_observations(rendered)
        assert again == obs
        assert parse_observations(render_observations_csv(again)) == again


class TestComputeReturns:
    def test_simple_ten_percent(self):
        series = compute_returns(_obs("X", [100.0, 110.0]), "simple")
        assert series.returns == (pytest.approx(0.10),)
        assert series.dates[0] == dt.date(2019, 4, 2)

    def test_log_no_change(self):
        series = compute_returns(_obs("X", [100.0, 100.0]), "log")
        assert series.returns == (0.0,)

    def test_non_positive_value(self):
        obs = [
            Observation("X", dt.date(2019, 4, 1), 100.0),
            Observation("X", dt.date(2019, 4, 2), -5.0),
        ]
        with pytest.raises(NonPositiveValue):
            compute_returns(obs)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            compute_returns(_obs("X", [100.0]))

    def test_length_is_observations_minus_one(self):
        series = compute_returns(_obs("X", [1.0, 2.0, 3.0, 4.0]))
        assert len(series.returns) == 3

    def test_simple_and_log_agree_to_first_order(self):
        # |simple - log| <= simple^2 for |simple| < 0.5
        rng = np.random.default_rng(7)
        for _ in range(200):
            values = 100.0 * np.cumprod(1.0 + rng.uniform(-0.45, 0.45, 30))
            obs = _obs("X", values)
            simple = np.array(compute_returns(obs, "simple").returns)
            log = np.array(compute_returns(obs, "log").returns)
            assert np.all(np.abs(simple - log) <= simple**2 + 1e-15)


class TestAssemblePanel:
    def test_exact_partition_two_weeks(self):
        # 14 consecutive daily returns starting a Monday -> 2 windows of 7
        obs = _obs("X", np.linspace(100, 120, 15), start=dt.date(2019, 3, 31))
        series = compute_returns(obs)
        assert len(series.returns) == 14
        assert series.dates[0] == dt.date(2019, 4, 1)  # a Monday
        panel, report = assemble_panel([series], min_days=5)
        assert [len(w.returns) for w in panel.windows] == [7, 7]
        assert report.dropped_windows == {}

    def test_short_window_dropped_and_counted(self):
        obs = _obs("X", [100.0, 101.0, 102.0, 103.0], start=dt.date(2019, 4, 1))
        series = compute_returns(obs)  # 3 returns, all in one week
        panel, report = assemble_panel([series], min_days=5)
        assert panel.windows == ()
        assert report.dropped_windows == {"X": 1}
        assert report.dropped_returns == {"X": 3}

    def test_week_boundary_split(self):
        # Returns dated 2019-04-04 (Thu) .. 2019-04-10 (Wed), enumerated by
        # hand: Apr 4-7 belong to 2019-W14 (Monday 2019-04-01), Apr 8-10 to
        # 2019-W15 (Monday 2019-04-08).
        obs = _obs("X", np.linspace(50, 57, 8), start=dt.date(2019, 4, 3))
        series = compute_returns(obs)
        assert series.dates[0] == dt.date(2019, 4, 4)
        assert series.dates[-1] == dt.date(2019, 4, 10)
        panel, _ = assemble_panel([series], min_days=2)
        assert [(w.week_id, w.week_start, len(w.returns)) for w in panel.windows] == [
            ("2019-W14", dt.date(2019, 4, 1), 4),
            ("2019-W15", dt.date(2019, 4, 8), 3),
        ]

    def test_iso_year_boundary(self):
        # 2019-12-30 is a Monday belonging to ISO week 2020-W01.
        obs = _obs("X", np.linspace(10, 12, 8), start=dt.date(2019, 12, 29))
        series = compute_returns(obs)
        panel, _ = assemble_panel([series], min_days=2)
        assert panel.windows[0].week_id == "2020-W01"
        assert panel.windows[0].week_start == dt.date(2019, 12, 30)

    def test_min_days_validation(self):
        with pytest.raises(ValueError):
            assemble_panel([], min_days=1)

    def test_conservation_of_rows(self):
        # total returns == kept window lengths + dropped returns
        rng = np.random.default_rng(17)
        for trial in range(20):
            series_list = []
            total = 0
            for s in range(3):
                n = int(rng.integers(2, 40))
                start = dt.date(2019, 4, 1) + dt.timedelta(days=int(rng.integers(0, 14)))
                obs = _obs(f"S{s}", np.exp(rng.normal(0, 0.1, n)).cumsum() + 1.0, start=start)
                series = compute_returns(obs)
                total += len(series.returns)
                series_list.append(series)
            min_days = int(rng.integers(2, 8))
            panel, report = assemble_panel(series_list, min_days=min_days)
            kept = sum(len(w.returns) for w in panel.windows)
            dropped = sum(report.dropped_returns.values())
            assert kept + dropped == total
            assert all(min_days <= len(w.returns) <= 7 for w in panel.windows)

    def test_no_duplicate_windows(self):
        rng = np.random.default_rng(3)
        obs = _obs("X", np.exp(rng.normal(0, 0.05, 60)).cumsum() + 2.0)
        panel, _ = assemble_panel([compute_returns(obs)], min_days=2)
        keys = [(w.symbol, w.week_id) for w in panel.windows]
        assert len(set(keys)) == len(keys)
