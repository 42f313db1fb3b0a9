import numpy as np
import pytest

from dustcast.errors import FittingError, NotFittedError
from dustcast.models.static import (
    DEFAULT_HYPERPARAMETERS,
    MIN_FIT_ROWS,
    STATIC_FAMILIES,
    StaticRegressor,
    fit_static_regressor,
)


def linear_problem(n=80, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(0.0, 1.0, size=(n, 6))
    coefs = np.array([0.5, -1.2, 0.3, 0.0, 2.0, 0.1])
    y = X @ coefs + 3.0
    return X, y


class TestLinearRecovery:
    def test_exact_linear_target(self):
        X, y = linear_problem()
        model = StaticRegressor("linear").fit(X, y)
        pred = model.predict(X)
        ss_res = np.sum((y - pred) ** 2)
        ss_tot = np.sum((y - y.mean()) ** 2)
        assert 1.0 - ss_res / ss_tot >= 0.999


class TestAllFamilies:
    @pytest.mark.parametrize("family", STATIC_FAMILIES)
    def test_fit_predict_finite(self, family):
        X, y = linear_problem(n=60, seed=2)
        model = StaticRegressor(family, seed=7).fit(X, y)
        pred = model.predict(X)
        assert pred.shape == (60,)
        assert np.all(np.isfinite(pred))

    @pytest.mark.parametrize("family", STATIC_FAMILIES)
    def test_deterministic_given_seed(self, family):
        X, y = linear_problem(n=50, seed=3)
        a = StaticRegressor(family, seed=11).fit(X, y).predict(X)
        b = StaticRegressor(family, seed=11).fit(X, y).predict(X)
        np.testing.assert_array_equal(a, b)

    def test_constant_target(self):
        X, _ = linear_problem(n=30, seed=4)
        y = np.full(30, 5.0)
        for family in ("gradient-boosted-trees", "linear", "random-forest"):
            pred = StaticRegressor(family).fit(X, y).predict(X)
            np.testing.assert_allclose(pred, 5.0, atol=1e-6)


class TestGuards:
    def test_unknown_family(self):
        with pytest.raises(ValueError, match="family"):
            StaticRegressor("deep-forest")

    def test_predict_before_fit(self):
        with pytest.raises(NotFittedError):
            StaticRegressor("linear").predict(np.ones((3, 6)))

    def test_too_few_rows(self):
        X, y = linear_problem(n=MIN_FIT_ROWS - 1)
        with pytest.raises(FittingError):
            StaticRegressor("linear").fit(X, y)

    def test_non_finite_input(self):
        X, y = linear_problem(n=20)
        X[3, 2] = np.nan
        with pytest.raises(FittingError):
            StaticRegressor("linear").fit(X, y)

    def test_predict_width_mismatch(self):
        X, y = linear_problem(n=20)
        model = StaticRegressor("linear").fit(X, y)
        with pytest.raises(ValueError):
            model.predict(np.ones((3, 4)))

    def test_predict_one(self):
        X, y = linear_problem(n=20)
        model = StaticRegressor("linear").fit(X, y)
        value = model.predict_one(X[0])
        assert value == pytest.approx(model.predict(X[:1])[0])


class TestHyperparameters:
    def test_defaults_cover_every_family(self):
        assert set(DEFAULT_HYPERPARAMETERS) == set(STATIC_FAMILIES)

    def test_override_merges(self):
        X, y = linear_problem(n=40)
        model = StaticRegressor("random-forest", {"n_estimators": 5}).fit(X, y)
        assert model.hyperparameters["n_estimators"] == 5
        assert np.all(np.isfinite(model.predict(X)))

    def test_fit_helper_returns_same_object(self):
        X, y = linear_problem(n=20)
        model = StaticRegressor("linear")
        assert fit_static_regressor(model, X, y) is model
