"""Model layer: stage-1 hybrid AOD model, stage-2 regressor, baselines, metrics."""

from .metrics import MetricsReport, evaluate_metrics
from .static import STATIC_FAMILIES, StaticRegressor, fit_static_regressor
from .fusion import (
    BACKEND_KINDS,
    FusionConfig,
    FusionCore,
    Standardizer,
)
from .hybrid import (
    AodPrediction,
    HybridAodModel,
    fit_efficiency_regressor,
    fit_sequence_fusion,
    predict_aod,
)
from .baselines import BaselineTable, run_baseline_comparison

__all__ = [
    "MetricsReport",
    "evaluate_metrics",
    "STATIC_FAMILIES",
    "StaticRegressor",
    "fit_static_regressor",
    "BACKEND_KINDS",
    "FusionConfig",
    "FusionCore",
    "Standardizer",
    "AodPrediction",
    "HybridAodModel",
    "fit_efficiency_regressor",
    "fit_sequence_fusion",
    "predict_aod",
    "BaselineTable",
    "run_baseline_comparison",
]
