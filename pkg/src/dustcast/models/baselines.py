"""Baseline comparison across regressor families on the stage-2 task.

Every family sees the same chronological split and the same seed, so the
resulting table differs only in the model itself.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

from ..features import Stage2Dataset, chronological_split
from .metrics import MetricsReport, evaluate_metrics
from .static import STATIC_FAMILIES, StaticRegressor


@dataclass(frozen=True)
class BaselineRow:
    family: str
    metrics: MetricsReport


@dataclass(frozen=True)
class BaselineTable:
    rows: tuple[BaselineRow, ...]
    test_fraction: float
    seed: int

    def format_table(self) -> str:
        width = max(len(r.family) for r in self.rows)
        lines = [f"{'family':<{width}}  {'rmse':>10}  {'mae':>10}  {'r2':>10}  {'n':>5}"]
        for r in self.rows:
            r2 = "undefined" if r.metrics.r2 is None else f"{r.metrics.r2:.6f}"
            lines.append(
                f"{r.family:<{width}}  {r.metrics.rmse:>10.6f}  "
                f"{r.metrics.mae:>10.6f}  {r2:>10}  {r.metrics.n:>5}"
            )
        return "\n".join(lines)

    def write_csv(self, path: Union[str, Path]):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["family", "rmse", "mae", "r2", "n"])
            for r in self.rows:
                writer.writerow([
                    r.family, repr(r.metrics.rmse), repr(r.metrics.mae),
                    "" if r.metrics.r2 is None else repr(r.metrics.r2),
                    r.metrics.n,
                ])


def run_baseline_comparison(stage2: Stage2Dataset,
                            families: Sequence[str] = STATIC_FAMILIES,
                            test_fraction: float = 0.2,
                            seed: int = 42) -> BaselineTable:
    if len(families) < 2:
        raise ValueError(f"need at least 2 families to compare, got {len(families)}")
    train, test = chronological_split(stage2, test_fraction)
    rows = []
    for family in families:
        model = StaticRegressor(family=family, seed=seed)
        model.fit(train.feature_matrix(), train.target_vector())
        predictions = model.predict(test.feature_matrix())
        rows.append(BaselineRow(
            family=family,
            metrics=evaluate_metrics(test.target_vector(), predictions),
        ))
    return BaselineTable(rows=tuple(rows), test_fraction=test_fraction, seed=seed)
