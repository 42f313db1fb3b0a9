"""Static-feature regressors.

A thin family dispatcher over sklearn estimators. The same type serves
two roles: the static branch of the stage-1 hybrid (6 meteorological
features) and the stage-2 efficiency-loss regressor (9 features).
"""

from __future__ import annotations

from typing import Mapping, Optional

import numpy as np
from sklearn.ensemble import GradientBoostingRegressor, RandomForestRegressor
from sklearn.linear_model import LinearRegression
from sklearn.neural_network import MLPRegressor
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler
from sklearn.svm import SVR

from ..errors import FittingError, NotFittedError

STATIC_FAMILIES = (
    "gradient-boosted-trees",
    "linear",
    "random-forest",
    "support-vector",
    "multilayer-perceptron",
)

DEFAULT_HYPERPARAMETERS: dict[str, dict] = {
    "gradient-boosted-trees": {"n_estimators": 300, "learning_rate": 0.05, "max_depth": 3},
    "linear": {},
    "random-forest": {"n_estimators": 300, "n_jobs": 1},
    "support-vector": {"C": 1.0, "epsilon": 0.01},
    "multilayer-perceptron": {"hidden_layer_sizes": (64, 32), "max_iter": 600},
}

MIN_FIT_ROWS = 10


def _build_estimator(family: str, params: dict, seed: int):
    if family == "gradient-boosted-trees":
        return GradientBoostingRegressor(random_state=seed, **params)
    if family == "linear":
        return LinearRegression(**params)
    if family == "random-forest":
        return RandomForestRegressor(random_state=seed, **params)
    if family == "support-vector":
        return SVR(**params)
    if family == "multilayer-perceptron":
        # scale-sensitive; wrap with a scaler so raw-unit features converge
        return make_pipeline(StandardScaler(), MLPRegressor(random_state=seed, **params))
    raise ValueError(f"unknown family {family!r}; known: {', '.join(STATIC_FAMILIES)}")


class StaticRegressor:
    """One of five interchangeable regressor families behind a fixed API."""

    def __init__(self, family: str = "gradient-boosted-trees",
                 hyperparameters: Optional[Mapping] = None, seed: int = 42):
        if family not in STATIC_FAMILIES:
            raise ValueError(f"unknown family {family!r}; known: {', '.join(STATIC_FAMILIES)}")
        self.family = family
        self.hyperparameters = dict(
            DEFAULT_HYPERPARAMETERS[family] if hyperparameters is None else hyperparameters
        )
        self.seed = seed
        self._estimator = _build_estimator(family, self.hyperparameters, seed)
        self._n_features: Optional[int] = None

    @property
    def fitted(self) -> bool:
        return self._n_features is not None

    @property
    def n_features(self) -> Optional[int]:
        return self._n_features

    def fit(self, X: np.ndarray, y: np.ndarray) -> "StaticRegressor":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ValueError(f"shape mismatch: X {X.shape}, y {y.shape}")
        if X.shape[0] < MIN_FIT_ROWS:
            raise FittingError(f"need at least {MIN_FIT_ROWS} rows, got {X.shape[0]}")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise FittingError("non-finite values in training data")
        self._estimator.fit(X, y)
        self._n_features = X.shape[1]
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        if not self.fitted:
            raise NotFittedError(f"{self.family} regressor used before fit")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self._n_features:
            raise ValueError(
                f"expected (n, {self._n_features}) feature matrix, got {X.shape}"
            )
        return np.asarray(self._estimator.predict(X), dtype=float)

    def predict_one(self, x: np.ndarray) -> float:
        return float(self.predict(np.asarray(x, dtype=float).reshape(1, -1))[0])


def fit_static_regressor(model: StaticRegressor, X: np.ndarray, y: np.ndarray) -> StaticRegressor:
    return model.fit(X, y)
