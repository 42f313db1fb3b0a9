"""Regression evaluation metrics.

Computed directly from their definitions rather than via sklearn so the
undefined-R2 case (constant targets) is an explicit marker instead of a
library-specific convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class MetricsReport:
    rmse: float
    mae: float
    r2: Optional[float]  # None when Var(y) = 0
    n: int

    def to_dict(self) -> dict:
        return {"rmse": self.rmse, "mae": self.mae, "r2": self.r2, "n": self.n}

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        return cls(rmse=float(data["rmse"]), mae=float(data["mae"]),
                   r2=None if data["r2"] is None else float(data["r2"]),
                   n=int(data["n"]))


def evaluate_metrics(y: Sequence[float], y_hat: Sequence[float]) -> MetricsReport:
    """RMSE, MAE and R2 of predictions against targets.

    R2 is 1 - SS_res/SS_tot; when the targets are constant SS_tot is zero
    and R2 has no defined value, reported as None.
    """
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape or y.ndim != 1:
        raise ValueError(f"shape mismatch: targets {y.shape}, predictions {y_hat.shape}")
    if len(y) < 2:
        raise ValueError(f"need at least 2 samples, got {len(y)}")

    err = y - y_hat
    rmse = float(np.sqrt(np.mean(err ** 2)))
    mae = float(np.mean(np.abs(err)))
    ss_res = float(np.sum(err ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = None if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return MetricsReport(rmse=rmse, mae=mae, r2=r2, n=len(y))
