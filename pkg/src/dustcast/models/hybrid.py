"""Stage-1 hybrid AOD model and the stage-2 efficiency-loss regressor.

The hybrid combines a fitted static regressor (frozen), a sequence
encoder, and a dense fusion head. Training order: the static branch is
fitted elsewhere first; fit_sequence_fusion then trains encoder + head
jointly against same-day AOD with the static branch's predictions as an
extra fusion input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ..errors import EmptyDatasetError, NotFittedError
from ..features import SequenceFeatures, Stage1Dataset, Stage2Dataset, StaticFeatures
from .fusion import FusionConfig, FusionCore, Standardizer
from .static import StaticRegressor


class AodPrediction(NamedTuple):
    value: float
    clamped: bool
    raw: float


class BatchPrediction(NamedTuple):
    values: np.ndarray
    clamped: np.ndarray
    raw: np.ndarray


@dataclass
class HybridAodModel:
    static: StaticRegressor
    core: FusionCore = field(default_factory=FusionCore)
    standardizer: Optional[Standardizer] = None

    @property
    def fitted(self) -> bool:
        return self.static.fitted and self.core.fitted and self.standardizer is not None

    @property
    def config(self) -> FusionConfig:
        return self.core.config

    def fit(self, stage1: Stage1Dataset) -> "HybridAodModel":
        if not self.static.fitted:
            raise NotFittedError("static regressor must be fitted before the fusion step")
        if len(stage1) == 0:
            raise EmptyDatasetError("stage-1 dataset is empty")
        seq = stage1.sequence_matrix()
        static_pred = self.static.predict(stage1.static_matrix())
        fused_inputs = np.hstack([seq, static_pred[:, None]])
        self.standardizer = Standardizer.fit(fused_inputs)
        std = self.standardizer.transform(fused_inputs)
        self.core.fit(std[:, :4], std[:, 4], stage1.target_vector())
        return self

    def predict_batch(self, static_X: np.ndarray, seq_X: np.ndarray) -> BatchPrediction:
        if not self.fitted:
            raise NotFittedError("hybrid model used before fit")
        static_pred = self.static.predict(np.asarray(static_X, dtype=float))
        fused = np.hstack([np.asarray(seq_X, dtype=float), static_pred[:, None]])
        std = self.standardizer.transform(fused)
        raw = self.core.predict_raw(std[:, :4], std[:, 4])
        clamped = raw < 0
        return BatchPrediction(values=np.maximum(raw, 0.0), clamped=clamped, raw=raw)

    def predict_one(self, static: StaticFeatures, seq: SequenceFeatures) -> AodPrediction:
        batch = self.predict_batch(static.as_array()[None, :], seq.as_array()[None, :])
        return AodPrediction(value=float(batch.values[0]),
                             clamped=bool(batch.clamped[0]),
                             raw=float(batch.raw[0]))

    def predict_dataset(self, stage1: Stage1Dataset) -> BatchPrediction:
        return self.predict_batch(stage1.static_matrix(), stage1.sequence_matrix())


def fit_sequence_fusion(model: HybridAodModel, stage1: Stage1Dataset) -> HybridAodModel:
    return model.fit(stage1)


def predict_aod(model: HybridAodModel, static: StaticFeatures,
                seq: SequenceFeatures) -> AodPrediction:
    return model.predict_one(static, seq)


def fit_efficiency_regressor(model: Optional[StaticRegressor],
                             stage2: Stage2Dataset) -> StaticRegressor:
    """Fit the stage-2 regressor on the 9-column feature layout."""
    if len(stage2) == 0:
        raise EmptyDatasetError("stage-2 dataset is empty")
    if model is None:
        model = StaticRegressor(family="gradient-boosted-trees")
    return model.fit(stage2.feature_matrix(), stage2.target_vector())
