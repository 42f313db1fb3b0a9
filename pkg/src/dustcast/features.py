"""Temporal feature engineering and dataset assembly.

Turns merged daily records into the two supervised datasets: stage 1
predicts same-day AOD from meteorology plus lagged/rolled AOD history,
stage 2 predicts efficiency loss from predicted AOD, irradiances and
meteorology. Also hosts the small EDA statistics the workflow reports
(correlation matrix, seasonal strength).
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, replace
from math import ceil
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import EmptyDatasetError
from .ingestion import MergedDailyRecord

STATIC_FEATURE_NAMES = ("t2m", "t2mdew", "ws2m", "qv2m", "ps", "month")
SEQUENCE_FEATURE_NAMES = ("aod_lag2", "aod_lag1", "aod_roll3", "aod_roll7")
STAGE2_FEATURE_NAMES = (
    "predicted_aod", "irradiance_actual", "irradiance_clear_sky",
    "t2m", "t2mdew", "ws2m", "qv2m", "ps", "month",
)

# lag2 needs 2 prior days, roll7 needs 6: first 6 rows can never be complete
WARMUP_ROWS = 6


@dataclass(frozen=True)
class StaticFeatures:
    t2m: float
    t2mdew: float
    ws2m: float
    qv2m: float
    ps: float
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")

    def as_array(self) -> np.ndarray:
        return np.array([self.t2m, self.t2mdew, self.ws2m, self.qv2m,
                         self.ps, float(self.month)])


@dataclass(frozen=True)
class SequenceFeatures:
    aod_lag1: float
    aod_lag2: float
    aod_roll3: float
    aod_roll7: float

    def __post_init__(self):
        for name in ("aod_lag1", "aod_lag2", "aod_roll3", "aod_roll7"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} < 0")

    def as_array(self) -> np.ndarray:
        """Encoder layout: oldest signal first (lag2, lag1, roll3, roll7)."""
        return np.array([self.aod_lag2, self.aod_lag1, self.aod_roll3, self.aod_roll7])


@dataclass(frozen=True)
class Stage1Row:
    date: dt.date
    static: StaticFeatures
    sequence: SequenceFeatures
    target_aod: float
    aod_interpolated: bool = False


@dataclass(frozen=True)
class Stage2Row:
    date: dt.date
    predicted_aod: float
    irradiance_actual: float
    irradiance_clear_sky: float
    static: StaticFeatures
    target_efficiency_loss_pct: float

    def __post_init__(self):
        if self.predicted_aod < 0:
            raise ValueError(f"predicted_aod < 0 on {self.date}")


@dataclass(frozen=True)
class Stage1Dataset:
    rows: tuple[Stage1Row, ...]

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(r.date for r in self.rows)

    def static_matrix(self) -> np.ndarray:
        return np.stack([r.static.as_array() for r in self.rows])

    def sequence_matrix(self) -> np.ndarray:
        return np.stack([r.sequence.as_array() for r in self.rows])

    def target_vector(self) -> np.ndarray:
        return np.array([r.target_aod for r in self.rows])

    def write_csv(self, path: Union[str, Path]):
        header = ("date",) + STATIC_FEATURE_NAMES + SEQUENCE_FEATURE_NAMES + ("target_aod",)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for r in self.rows:
                writer.writerow(
                    [r.date.isoformat()]
                    + [repr(v) for v in r.static.as_array()]
                    + [repr(v) for v in r.sequence.as_array()]
                    + [repr(r.target_aod)]
                )


@dataclass(frozen=True)
class Stage2Dataset:
    rows: tuple[Stage2Row, ...]

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(r.date for r in self.rows)

    def feature_matrix(self) -> np.ndarray:
        out = np.empty((len(self.rows), len(STAGE2_FEATURE_NAMES)))
        for i, r in enumerate(self.rows):
            out[i, :3] = (r.predicted_aod, r.irradiance_actual, r.irradiance_clear_sky)
            out[i, 3:] = r.static.as_array()
        return out

    def target_vector(self) -> np.ndarray:
        return np.array([r.target_efficiency_loss_pct for r in self.rows])

    def with_predictions(self, predicted: Sequence[float]) -> "Stage2Dataset":
        """Swap in a new predicted_aod column, e.g. out-of-fold values."""
        if len(predicted) != len(self.rows):
            raise ValueError(f"{len(predicted)} predictions for {len(self.rows)} rows")
        return Stage2Dataset(tuple(
            replace(r, predicted_aod=float(p)) for r, p in zip(self.rows, predicted)
        ))

    def write_csv(self, path: Union[str, Path]):
        header = ("date",) + STAGE2_FEATURE_NAMES + ("target_efficiency_loss_pct",)
        matrix = self.feature_matrix()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for r, feats in zip(self.rows, matrix):
                writer.writerow(
                    [r.date.isoformat()]
                    + [repr(v) for v in feats]
                    + [repr(r.target_efficiency_loss_pct)]
                )


@dataclass(frozen=True)
class AssembledDatasets:
    stage1: Stage1Dataset
    stage2: Stage2Dataset
    dropped_rows: int


def make_lag_features(aod_series: Sequence[float]) -> list[tuple[float, float]]:
    """(lag1, lag2) per day from the third day on."""
    if len(aod_series) < 3:
        raise ValueError(f"need at least 3 days for lag features, got {len(aod_series)}")
    return [(aod_series[t - 1], aod_series[t - 2]) for t in range(2, len(aod_series))]


def make_rolling_means(aod_series: Sequence[float], n: int) -> list[float]:
    """Trailing n-day mean including the current day, from day n on."""
    if n < 1:
        raise ValueError(f"window must be >= 1, got {n}")
    if len(aod_series) < n:
        raise ValueError(f"series of length {len(aod_series)} shorter than window {n}")
    return [sum(aod_series[t - n + 1:t + 1]) / n for t in range(n - 1, len(aod_series))]


def assemble_datasets(
    records: Sequence[MergedDailyRecord],
    stage1_predictions: Optional[Mapping[dt.date, float]] = None,
) -> AssembledDatasets:
    """Build both supervised datasets from merged records.

    The first 6 rows are dropped (lag/rolling warm-up). Stage-2 rows share
    stage-1's calendar and take predicted_aod from *stage1_predictions*
    when given, falling back to the observed AOD otherwise (bootstrap mode
    for the very first training pass). Stage-2 rows without a derived
    efficiency-loss target are dropped silently.
    """
    records = sorted(records, key=lambda r: r.date)
    dropped = min(len(records), WARMUP_ROWS)
    usable = records[WARMUP_ROWS:]
    if not usable:
        raise EmptyDatasetError(
            f"{len(records)} records leave no rows after {WARMUP_ROWS}-day warm-up"
        )

    aod = [r.aod for r in records]
    lags = make_lag_features(aod)
    roll3 = make_rolling_means(aod, 3)
    roll7 = make_rolling_means(aod, 7)

    stage1_rows = []
    stage2_rows = []
    for offset, rec in enumerate(usable):
        t = offset + WARMUP_ROWS
        lag1, lag2 = lags[t - 2]
        static = StaticFeatures(
            t2m=rec.t2m, t2mdew=rec.t2mdew, ws2m=rec.ws2m,
            qv2m=rec.qv2m, ps=rec.ps, month=rec.date.month,
        )
        sequence = SequenceFeatures(
            aod_lag1=lag1, aod_lag2=lag2,
            aod_roll3=roll3[t - 2], aod_roll7=roll7[t - 6],
        )
        stage1_rows.append(Stage1Row(
            date=rec.date, static=static, sequence=sequence,
            target_aod=rec.aod, aod_interpolated=rec.aod_interpolated,
        ))

        if rec.efficiency_loss_pct is None:
            continue
        if stage1_predictions is not None:
            if rec.date not in stage1_predictions:
                continue
            predicted = float(stage1_predictions[rec.date])
        else:
            predicted = rec.aod
        stage2_rows.append(Stage2Row(
            date=rec.date,
            predicted_aod=predicted,
            irradiance_actual=rec.irradiance_actual,
            irradiance_clear_sky=rec.irradiance_clear_sky,
            static=static,
            target_efficiency_loss_pct=rec.efficiency_loss_pct,
        ))

    return AssembledDatasets(
        stage1=Stage1Dataset(tuple(stage1_rows)),
        stage2=Stage2Dataset(tuple(stage2_rows)),
        dropped_rows=dropped,
    )


def chronological_split(dataset, test_fraction: float):
    """Split off the last ceil(fraction*N) rows as the test set."""
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n = len(dataset.rows)
    n_test = ceil(test_fraction * n)
    cls = type(dataset)
    return cls(dataset.rows[:n - n_test]), cls(dataset.rows[n - n_test:])


@dataclass(frozen=True)
class PearsonMatrix:
    names: tuple[str, ...]
    values: np.ndarray
    excluded_constant: tuple[str, ...]

    def lookup(self, a: str, b: str) -> float:
        for name in (a, b):
            if name not in self.names:
                raise KeyError(
                    f"{name!r} not in correlation matrix (columns: {', '.join(self.names)})"
                )
        return float(self.values[self.names.index(a), self.names.index(b)])


_NUMERIC_COLUMNS = (
    "t2m", "t2mdew", "ws2m", "qv2m", "ps",
    "irradiance_clear_sky", "irradiance_actual", "aod", "efficiency_loss_pct",
)


def pearson_matrix(records: Sequence[MergedDailyRecord]) -> PearsonMatrix:
    """Pairwise Pearson r over the numeric daily columns.

    Constant columns have no defined correlation; they are excluded from
    the matrix and listed in the result instead.
    """
    if len(records) < 2:
        raise ValueError(f"need at least 2 rows, got {len(records)}")
    columns = {}
    for name in _NUMERIC_COLUMNS:
        values = [getattr(r, name) for r in records]
        if any(v is None for v in values):
            continue
        columns[name] = np.asarray(values, dtype=float)

    kept, excluded = [], []
    for name, values in columns.items():
        (excluded if np.ptp(values) == 0 else kept).append(name)

    data = np.stack([columns[name] for name in kept])
    matrix = np.corrcoef(data)
    return PearsonMatrix(names=tuple(kept), values=matrix,
                         excluded_constant=tuple(excluded))


def seasonal_strength(aod_series: Sequence[float], period: int) -> float:
    """Fraction of detrended variance explained by the periodic mean profile.

    Detrending uses a centered moving average (window = period, widened to
    period+1 when even so the window stays symmetric); edge days without a
    full window are excluded. Returns 0 for series with no detrended
    variance, clamps to [0, 1] otherwise.
    """
    if period < 2:
        raise ValueError(f"period must be >= 2, got {period}")
    x = np.asarray(aod_series, dtype=float)
    if len(x) < 2 * period:
        raise ValueError(f"need >= {2 * period} points for period {period}, got {len(x)}")

    window = period if period % 2 == 1 else period + 1
    half = window // 2
    kernel = np.ones(window) / window
    trend = np.convolve(x, kernel, mode="valid")
    core = slice(half, len(x) - half)
    detrended = x[core] - trend
    phases = np.arange(len(x))[core] % period

    total = float(np.var(detrended))
    if total == 0:
        return 0.0
    profile = np.array([detrended[phases == p].mean() for p in range(period)])
    residual = detrended - profile[phases]
    return float(np.clip(1.0 - np.var(residual) / total, 0.0, 1.0))
