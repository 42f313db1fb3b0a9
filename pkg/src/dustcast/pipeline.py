"""End-to-end orchestration: train both stages, evaluate, attribute.

Stage 2 is trained on stage-1 *predictions*, not observations. At first
training that is circular, so the default bootstrap fits throwaway
stage-1 models per contiguous fold and uses their out-of-fold predictions
over the training range; the holdout range uses the final stage-1 model,
which never saw it. The "observed" fallback skips all that and trains
stage 2 on measured AOD.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .config import AppConfig
from .errors import FittingError
from .explain import (
    AttributionReport,
    efficiency_attribution,
    static_branch_attribution,
    temporal_branch_attribution,
)
from .features import (
    SEQUENCE_FEATURE_NAMES,
    STAGE2_FEATURE_NAMES,
    STATIC_FEATURE_NAMES,
    Stage1Dataset,
    assemble_datasets,
    chronological_split,
)
from .ingestion import MergedDailyRecord
from .models.fusion import FusionCore
from .models.hybrid import HybridAodModel, fit_efficiency_regressor
from .models.metrics import MetricsReport, evaluate_metrics
from .models.static import StaticRegressor


@dataclass(frozen=True)
class TrainResult:
    hybrid: HybridAodModel
    eff_model: StaticRegressor
    stage1_metrics: MetricsReport
    stage2_metrics: MetricsReport
    dropped_rows: int
    n_stage1_train: int
    n_stage1_test: int

    @property
    def metrics(self) -> dict[str, MetricsReport]:
        return {"stage1": self.stage1_metrics, "stage2": self.stage2_metrics}


def _fit_hybrid(stage1_train: Stage1Dataset, config: AppConfig,
                seed_offset: int = 0) -> HybridAodModel:
    seed = config.seed + seed_offset
    static = StaticRegressor(family=config.static_family, seed=seed)
    static.fit(stage1_train.static_matrix(), stage1_train.target_vector())
    core = FusionCore(kind=config.encoder_kind,
                      config=replace(config.fusion, seed=seed))
    return HybridAodModel(static=static, core=core).fit(stage1_train)


def out_of_fold_aod_predictions(stage1_train: Stage1Dataset,
                                config: AppConfig) -> dict[dt.date, float]:
    """Predicted AOD per training date from models that never saw the date."""
    n = len(stage1_train)
    folds = np.array_split(np.arange(n), config.oof_folds)
    if min(len(f) for f in folds) == 0:
        raise FittingError(
            f"{n} training rows cannot fill {config.oof_folds} folds"
        )
    predictions: dict[dt.date, float] = {}
    for fold_idx, fold in enumerate(folds):
        mask = np.ones(n, dtype=bool)
        mask[fold] = False
        rest = Stage1Dataset(tuple(row for row, keep in zip(stage1_train.rows, mask) if keep))
        # distinct seed per fold keeps the throwaway models independent
        model = _fit_hybrid(rest, config, seed_offset=100 + fold_idx)
        held_out = Stage1Dataset(tuple(stage1_train.rows[i] for i in fold))
        batch = model.predict_dataset(held_out)
        for row, value in zip(held_out.rows, batch.values):
            predictions[row.date] = float(value)
    return predictions


def train_pipeline(records: Sequence[MergedDailyRecord],
                   config: AppConfig) -> TrainResult:
    assembled = assemble_datasets(records)
    stage1_train, stage1_test = chronological_split(assembled.stage1,
                                                    config.test_fraction)
    hybrid = _fit_hybrid(stage1_train, config)
    stage1_holdout = hybrid.predict_dataset(stage1_test)
    stage1_metrics = evaluate_metrics(stage1_test.target_vector(),
                                      stage1_holdout.values)

    if config.stage2_bootstrap == "out-of-fold":
        mapping = out_of_fold_aod_predictions(stage1_train, config)
        test_batch = hybrid.predict_dataset(stage1_test)
        for row, value in zip(stage1_test.rows, test_batch.values):
            mapping[row.date] = float(value)
        assembled2 = assemble_datasets(records, stage1_predictions=mapping)
    else:
        assembled2 = assembled

    stage2_train, stage2_test = chronological_split(assembled2.stage2,
                                                    config.test_fraction)
    eff_model = fit_efficiency_regressor(
        StaticRegressor(family=config.stage2_family, seed=config.seed),
        stage2_train,
    )
    stage2_metrics = evaluate_metrics(
        stage2_test.target_vector(),
        eff_model.predict(stage2_test.feature_matrix()),
    )

    return TrainResult(
        hybrid=hybrid,
        eff_model=eff_model,
        stage1_metrics=stage1_metrics,
        stage2_metrics=stage2_metrics,
        dropped_rows=assembled.dropped_rows,
        n_stage1_train=len(stage1_train),
        n_stage1_test=len(stage1_test),
    )


def evaluate_pipeline(hybrid: HybridAodModel, eff_model: StaticRegressor,
                      records: Sequence[MergedDailyRecord],
                      test_fraction: float) -> dict[str, MetricsReport]:
    """Holdout metrics for both stages of an already-trained pipeline."""
    assembled = assemble_datasets(records)
    _, stage1_test = chronological_split(assembled.stage1, test_fraction)
    stage1_pred = hybrid.predict_dataset(stage1_test)
    out = {"stage1": evaluate_metrics(stage1_test.target_vector(), stage1_pred.values)}

    full_batch = hybrid.predict_dataset(assembled.stage1)
    mapping = {row.date: float(v)
               for row, v in zip(assembled.stage1.rows, full_batch.values)}
    assembled2 = assemble_datasets(records, stage1_predictions=mapping)
    _, stage2_test = chronological_split(assembled2.stage2, test_fraction)
    out["stage2"] = evaluate_metrics(
        stage2_test.target_vector(),
        eff_model.predict(stage2_test.feature_matrix()),
    )
    return out


@dataclass(frozen=True)
class PipelineAttributions:
    stage1_static: AttributionReport
    stage1_temporal: AttributionReport
    stage2: AttributionReport


def attribution_reports(hybrid: HybridAodModel, eff_model: StaticRegressor,
                        records: Sequence[MergedDailyRecord],
                        n_instances: int = 30, mode: str = "exact",
                        seed: int = 42,
                        n_permutations: int = 2000) -> PipelineAttributions:
    """Shapley reports for the most recent rows against the full history.

    Stage 1 is explained branch by branch: the static regressor over its
    6 inputs, and the fusion core over the 4 temporal inputs with the
    static prediction pinned at the background mean.
    """
    assembled = assemble_datasets(records)
    stage1 = assembled.stage1
    kwargs = {"mode": mode, "seed": seed, "n_permutations": n_permutations}

    static_X = stage1.static_matrix()
    static_report = static_branch_attribution(
        hybrid.static, static_X[-n_instances:], static_X,
        STATIC_FEATURE_NAMES, **kwargs,
    )

    seq_X = stage1.sequence_matrix()
    background_pred = float(hybrid.static.predict(static_X).mean())
    temporal_report = temporal_branch_attribution(
        hybrid.core, hybrid.standardizer, background_pred,
        seq_X[-n_instances:], seq_X, SEQUENCE_FEATURE_NAMES, **kwargs,
    )

    full_batch = hybrid.predict_dataset(stage1)
    mapping = {row.date: float(v) for row, v in zip(stage1.rows, full_batch.values)}
    stage2 = assemble_datasets(records, stage1_predictions=mapping).stage2
    stage2_X = stage2.feature_matrix()
    stage2_report = efficiency_attribution(
        eff_model, stage2_X[-n_instances:], stage2_X,
        STAGE2_FEATURE_NAMES, **kwargs,
    )

    return PipelineAttributions(
        stage1_static=static_report,
        stage1_temporal=temporal_report,
        stage2=stage2_report,
    )
