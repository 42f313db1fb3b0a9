import datetime as dt
import math

import numpy as np
import pytest

from dustcast import features as F
from dustcast.errors import EmptyDatasetError
from dustcast.ingestion import MergedDailyRecord, derive_efficiency_loss

D = dt.date


def make_records(aod_series, start=D(2021, 3, 1), **field_series):
    records = []
    for i, aod in enumerate(aod_series):
        fields = dict(t2m=30.0 + 0.1 * i, t2mdew=22.0, ws2m=4.0, qv2m=12.0,
                      ps=95.0, irradiance_clear_sky=1000.0,
                      irradiance_actual=1000.0 * math.exp(-aod * 1.2))
        for key, series in field_series.items():
            fields[key] = series[i]
        records.append(MergedDailyRecord(date=start + dt.timedelta(days=i),
                                         aod=aod, aod_interpolated=False,
                                         **fields))
    return derive_efficiency_loss(records)


class TestLagAndRoll:
    def test_lag_pairs(self):
        # day t gets (aod[t-1], aod[t-2]); first usable day is index 2
        assert F.make_lag_features([1.0, 2.0, 3.0, 4.0]) == [(2.0, 1.0), (3.0, 2.0)]

    def test_lag_needs_three_days(self):
        with pytest.raises(ValueError):
            F.make_lag_features([1.0, 2.0])

    def test_roll_includes_current_day(self):
        assert F.make_rolling_means([1, 2, 3, 4, 5, 6, 7], 7) == [4.0]
        assert F.make_rolling_means([1, 2, 3, 4], 3) == [2.0, 3.0]

    def test_roll_window_validation(self):
        with pytest.raises(ValueError):
            F.make_rolling_means([1.0], 3)


class TestAssembleDatasets:
    def test_warmup_row_count(self):
        records = make_records([0.1 * (i + 1) for i in range(10)])
        out = F.assemble_datasets(records)
        assert len(out.stage1.rows) == 10 - F.WARMUP_ROWS

    def test_minimum_length(self):
        records = make_records([0.1] * F.WARMUP_ROWS)
        with pytest.raises(EmptyDatasetError):
            F.assemble_datasets(records)

    def test_first_row_worked_example(self):
        aod = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]
        records = make_records(aod)
        out = F.assemble_datasets(records)
        row = out.stage1.rows[0]
        assert row.date == records[6].date
        assert row.target_aod == pytest.approx(0.7)
        assert row.sequence.aod_lag1 == pytest.approx(0.6)
        assert row.sequence.aod_lag2 == pytest.approx(0.5)
        assert row.sequence.aod_roll3 == pytest.approx((0.5 + 0.6 + 0.7) / 3)
        assert row.sequence.aod_roll7 == pytest.approx(0.4)

    def test_sequence_matrix_column_order(self):
        records = make_records([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8])
        out = F.assemble_datasets(records)
        row = out.stage1.rows[0]
        np.testing.assert_allclose(
            out.stage1.sequence_matrix()[0],
            [row.sequence.aod_lag2, row.sequence.aod_lag1,
             row.sequence.aod_roll3, row.sequence.aod_roll7])

    def test_no_future_reads(self):
        # features at row t must be computable from records[:t+1] alone
        rng = np.random.default_rng(11)
        aod = 0.3 + 0.1 * rng.random(30)
        records = make_records(list(aod))
        full = F.assemble_datasets(records)
        for i, row in enumerate(full.stage1.rows):
            upto = records[:F.WARMUP_ROWS + i + 1]
            partial = F.assemble_datasets(upto)
            assert partial.stage1.rows[-1] == row

    def test_stage2_uses_observed_without_predictions(self):
        records = make_records([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8])
        out = F.assemble_datasets(records)
        for row in out.stage2.rows:
            rec = next(r for r in records if r.date == row.date)
            assert row.predicted_aod == pytest.approx(rec.aod)
        assert out.dropped_rows == F.WARMUP_ROWS

    def test_stage2_prediction_mapping(self):
        records = make_records([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8])
        preds = {records[6].date: 0.99}
        out = F.assemble_datasets(records, stage1_predictions=preds)
        assert len(out.stage2.rows) == 1
        assert out.stage2.rows[0].predicted_aod == pytest.approx(0.99)
        # rows without a prediction vanish from stage 2 but stay in stage 1
        assert len(out.stage1.rows) == 2

    def test_stage2_feature_order(self):
        records = make_records([0.2] * 8)
        out = F.assemble_datasets(records)
        row = out.stage2.rows[0]
        rec = next(r for r in records if r.date == row.date)
        np.testing.assert_allclose(
            out.stage2.feature_matrix()[0],
            [rec.aod, rec.irradiance_actual, rec.irradiance_clear_sky,
             rec.t2m, rec.t2mdew, rec.ws2m, rec.qv2m, rec.ps, rec.date.month])


class TestChronologicalSplit:
    def test_partition_and_order(self):
        records = make_records([0.1 + 0.01 * i for i in range(26)])
        ds = F.assemble_datasets(records).stage1
        train, test = F.chronological_split(ds, 0.2)
        assert len(train.rows) + len(test.rows) == len(ds.rows)
        assert len(test.rows) == math.ceil(0.2 * len(ds.rows))
        assert train.rows[-1].date < test.rows[0].date
        assert list(train.rows) + list(test.rows) == list(ds.rows)

    def test_fraction_bounds(self):
        records = make_records([0.1] * 10)
        ds = F.assemble_datasets(records).stage1
        for bad in (0.0, 1.0, -0.1):
            with pytest.raises(ValueError):
                F.chronological_split(ds, bad)


class TestPearsonMatrix:
    def test_perfect_linear_pair(self):
        n = 20
        t2m = [20.0 + i for i in range(n)]
        qv2m = [2.0 * v + 3.0 for v in t2m]
        records = make_records([0.1 + 0.02 * i for i in range(n)],
                               t2m=t2m, qv2m=qv2m)
        matrix = F.pearson_matrix(records)
        assert matrix.lookup("t2m", "qv2m") == pytest.approx(1.0, abs=1e-12)
        assert matrix.lookup("qv2m", "t2m") == pytest.approx(1.0, abs=1e-12)

    def test_diagonal_is_one(self):
        records = make_records([0.1 + 0.02 * i for i in range(15)])
        matrix = F.pearson_matrix(records)
        for name in matrix.names:
            assert matrix.lookup(name, name) == pytest.approx(1.0, abs=1e-12)

    def test_constant_column_excluded(self):
        records = make_records([0.1 + 0.02 * i for i in range(15)])
        matrix = F.pearson_matrix(records)
        assert "t2mdew" in matrix.excluded_constant
        with pytest.raises(KeyError):
            matrix.lookup("t2m", "t2mdew")

    def test_symmetry_and_range(self):
        rng = np.random.default_rng(3)
        n = 40
        records = make_records(list(0.2 + 0.1 * rng.random(n)),
                               t2m=list(25 + 5 * rng.random(n)),
                               t2mdew=list(18 + 3 * rng.random(n)),
                               ws2m=list(2 + 4 * rng.random(n)),
                               qv2m=list(10 + 2 * rng.random(n)),
                               ps=list(94 + rng.random(n)))
        matrix = F.pearson_matrix(records)
        values = np.asarray(matrix.values)
        np.testing.assert_allclose(values, values.T, atol=1e-12)
        assert np.all(np.abs(values) <= 1.0 + 1e-12)


class TestSeasonalStrength:
    def test_pure_sine_is_strongly_seasonal(self):
        t = np.arange(360)
        series = 0.5 + 0.2 * np.sin(2 * np.pi * t / 30)
        assert F.seasonal_strength(list(series), 30) >= 0.99

    def test_white_noise_is_weak(self):
        rng = np.random.default_rng(8)
        series = list(0.5 + 0.05 * rng.standard_normal(360))
        assert F.seasonal_strength(series, 30) <= 0.2

    def test_constant_series_is_zero(self):
        assert F.seasonal_strength([0.4] * 120, 30) == 0.0

    def test_range_clamped(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            series = list(rng.random(100))
            value = F.seasonal_strength(series, 12)
            assert 0.0 <= value <= 1.0

    def test_too_short_raises(self):
        with pytest.raises(ValueError):
            F.seasonal_strength([0.1] * 30, 30)

    def test_period_validation(self):
        with pytest.raises(ValueError):
            F.seasonal_strength([0.1] * 100, 1)


class TestDomainValidation:
    def test_month_bounds(self):
        with pytest.raises(ValueError):
            F.StaticFeatures(30.0, 22.0, 4.0, 12.0, 95.0, 13)

    def test_negative_sequence_values(self):
        with pytest.raises(ValueError):
            F.SequenceFeatures(-0.1, 0.2, 0.2, 0.2)
