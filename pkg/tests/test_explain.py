import numpy as np
import pytest

from dustcast import explain as E
from dustcast.features import (
    SEQUENCE_FEATURE_NAMES,
    STAGE2_FEATURE_NAMES,
    STATIC_FEATURE_NAMES,
)


def linear_fn(weights, intercept=0.0):
    w = np.asarray(weights, dtype=float)
    return lambda X: np.asarray(X, dtype=float) @ w + intercept


class TestExactOracles:
    def test_linear_model_recovers_weights(self):
        # with a zero-mean background, a linear model's attribution for the
        # all-ones instance is exactly its weight vector
        fn = linear_fn([2.0, 3.0], intercept=1.0)
        background = np.array([[1.0, -1.0], [-1.0, 1.0]])
        X = np.array([[1.0, 1.0]])
        report = E.shapley_values(fn, X, background, ["a", "b"])
        np.testing.assert_allclose(report.per_instance_phi[0], [2.0, 3.0], atol=1e-12)
        assert report.base_value == pytest.approx(1.0)

    def test_efficiency_property(self):
        rng = np.random.default_rng(4)
        fn = lambda X: np.sin(X[:, 0]) + X[:, 1] * X[:, 2] + 0.5 * X[:, 2]
        background = rng.normal(0, 1, size=(20, 3))
        X = rng.normal(0, 1, size=(6, 3))
        report = E.shapley_values(fn, X, background, ["a", "b", "c"])
        for i in range(6):
            total = report.base_value + report.per_instance_phi[i].sum()
            assert total == pytest.approx(report.predictions[i], abs=1e-9)

    def test_symmetry(self):
        fn = lambda X: X[:, 0] + X[:, 1]
        background = np.zeros((4, 2))
        X = np.array([[0.7, 0.7]])
        report = E.shapley_values(fn, X, background, ["a", "b"])
        phi = report.per_instance_phi[0]
        assert phi[0] == pytest.approx(phi[1], abs=1e-12)

    def test_dummy_feature_gets_zero(self):
        fn = linear_fn([5.0, 0.0, -2.0])
        rng = np.random.default_rng(5)
        background = rng.normal(0, 1, size=(10, 3))
        X = rng.normal(0, 1, size=(4, 3))
        report = E.shapley_values(fn, X, background, ["a", "b", "c"])
        np.testing.assert_allclose(report.per_instance_phi[:, 1], 0.0, atol=1e-12)

    def test_linearity(self):
        rng = np.random.default_rng(6)
        f = linear_fn([1.0, -2.0, 0.5])
        g = lambda X: np.cos(X[:, 1]) * X[:, 2]
        both = lambda X: f(X) + g(X)
        background = rng.normal(0, 1, size=(12, 3))
        X = rng.normal(0, 1, size=(3, 3))
        names = ["a", "b", "c"]
        phi_f = E.shapley_values(f, X, background, names).per_instance_phi
        phi_g = E.shapley_values(g, X, background, names).per_instance_phi
        phi_fg = E.shapley_values(both, X, background, names).per_instance_phi
        np.testing.assert_allclose(phi_fg, phi_f + phi_g, atol=1e-9)

    def test_instance_at_background_mean_gets_zero(self):
        rng = np.random.default_rng(7)
        fn = lambda X: X[:, 0] ** 2 + 3 * X[:, 1]
        background = rng.normal(2.0, 1.0, size=(30, 2))
        X = background.mean(axis=0, keepdims=True)
        report = E.shapley_values(fn, X, background, ["a", "b"])
        np.testing.assert_allclose(report.per_instance_phi[0], 0.0, atol=1e-12)


class TestSampledMode:
    def test_within_three_standard_errors_of_exact(self):
        rng = np.random.default_rng(8)
        fn = lambda X: X[:, 0] * X[:, 1] + np.exp(0.3 * X[:, 2]) - X[:, 3]
        background = rng.normal(0, 1, size=(15, 4))
        X = rng.normal(0, 1, size=(4, 4))
        names = ["a", "b", "c", "d"]
        exact = E.shapley_values(fn, X, background, names, mode="exact")
        sampled = E.shapley_values(fn, X, background, names, mode="sampled",
                                   n_permutations=2000, seed=0)
        for i in range(4):
            for j in range(4):
                err = abs(sampled.per_instance_phi[i, j] - exact.per_instance_phi[i, j])
                bound = 3.0 * sampled.stderr[i, j] + 1e-9
                assert err <= bound, (
                    f"instance {i} feature {names[j]}: error {err:.6f} "
                    f"exceeds 3*SE {bound:.6f}"
                )

    def test_sampled_efficiency_holds_exactly(self):
        # permutation estimates still telescope, so additivity is exact
        rng = np.random.default_rng(9)
        fn = lambda X: X[:, 0] ** 2 - X[:, 1]
        background = rng.normal(0, 1, size=(10, 2))
        X = rng.normal(0, 1, size=(3, 2))
        report = E.shapley_values(fn, X, background, ["a", "b"], mode="sampled",
                                  n_permutations=50, seed=3)
        for i in range(3):
            total = report.base_value + report.per_instance_phi[i].sum()
            assert total == pytest.approx(report.predictions[i], abs=1e-9)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(10)
        fn = lambda X: np.tanh(X).sum(axis=1)
        background = rng.normal(0, 1, size=(8, 3))
        X = rng.normal(0, 1, size=(2, 3))
        a = E.shapley_values(fn, X, background, ["a", "b", "c"], mode="sampled",
                             n_permutations=40, seed=5)
        b = E.shapley_values(fn, X, background, ["a", "b", "c"], mode="sampled",
                             n_permutations=40, seed=5)
        np.testing.assert_array_equal(a.per_instance_phi, b.per_instance_phi)

    def test_exact_mode_has_no_stderr(self):
        fn = linear_fn([1.0, 1.0])
        report = E.shapley_values(fn, np.ones((1, 2)), np.zeros((3, 2)), ["a", "b"])
        assert report.stderr is None


class TestRanking:
    def test_rank_by_mean_abs_descending(self):
        fn = linear_fn([0.1, 5.0, -2.0])
        rng = np.random.default_rng(11)
        background = rng.normal(0, 1, size=(10, 3))
        X = rng.normal(0, 1, size=(5, 3))
        report = E.shapley_values(fn, X, background, ["small", "big", "mid"])
        ordered = [name for name, *_ in E.attribution_summary(report)]
        assert ordered == ["big", "mid", "small"]
        assert report.rank[report.feature_names.index("big")] == 1

    def test_ties_break_lexicographically(self):
        fn = lambda X: X[:, 0] + X[:, 1]
        background = np.zeros((4, 2))
        X = np.array([[1.0, 1.0], [2.0, 2.0]])
        report = E.shapley_values(fn, X, background, ["zeta", "alpha"])
        ordered = [name for name, *_ in E.attribution_summary(report)]
        assert ordered == ["alpha", "zeta"]


class TestWaterfall:
    def build_report(self):
        fn = linear_fn([1.0, -4.0, 2.0], intercept=0.5)
        rng = np.random.default_rng(12)
        background = rng.normal(0, 1, size=(10, 3))
        X = rng.normal(0, 1, size=(3, 3))
        return E.shapley_values(fn, X, background, ["a", "b", "c"]), fn, X

    def test_entries_sorted_by_magnitude(self):
        report, _, _ = self.build_report()
        wf = E.waterfall_decomposition(report, 1)
        magnitudes = [abs(contribution) for _, contribution in wf.entries]
        assert magnitudes == sorted(magnitudes, reverse=True)

    def test_additivity(self):
        report, fn, X = self.build_report()
        for i in range(3):
            wf = E.waterfall_decomposition(report, i)
            total = wf.base_value + sum(c for _, c in wf.entries)
            assert total == pytest.approx(fn(X)[i], abs=1e-9)
            assert wf.prediction == pytest.approx(fn(X)[i], abs=1e-9)

    def test_unknown_instance(self):
        report, _, _ = self.build_report()
        with pytest.raises(ValueError):
            E.waterfall_decomposition(report, 99)


class TestGuards:
    def test_feature_cap_in_exact_mode(self):
        n = E.EXACT_FEATURE_CAP + 1
        fn = lambda X: X.sum(axis=1)
        with pytest.raises(ValueError, match="exact"):
            E.shapley_values(fn, np.ones((1, n)), np.zeros((2, n)),
                             [f"f{i}" for i in range(n)])

    def test_sampled_mode_allows_more_features(self):
        n = E.EXACT_FEATURE_CAP + 1
        fn = lambda X: X.sum(axis=1)
        report = E.shapley_values(fn, np.ones((1, n)), np.zeros((2, n)),
                                  [f"f{i:02d}" for i in range(n)], mode="sampled",
                                  n_permutations=20)
        assert report.per_instance_phi.shape == (1, n)

    def test_empty_background(self):
        fn = lambda X: X.sum(axis=1)
        with pytest.raises(ValueError):
            E.shapley_values(fn, np.ones((1, 2)), np.empty((0, 2)), ["a", "b"])

    def test_name_count_mismatch(self):
        fn = lambda X: X.sum(axis=1)
        with pytest.raises(ValueError):
            E.shapley_values(fn, np.ones((1, 2)), np.zeros((2, 2)), ["a"])

    def test_unknown_mode(self):
        fn = lambda X: X.sum(axis=1)
        with pytest.raises(ValueError):
            E.shapley_values(fn, np.ones((1, 2)), np.zeros((2, 2)), ["a", "b"],
                             mode="antithetic")


class TestModelBranches:
    def test_static_branch_shape_and_efficiency(self, trained, stage1_small):
        X = stage1_small.static_matrix()
        report = E.static_branch_attribution(trained.hybrid.static, X[-5:], X,
                                             STATIC_FEATURE_NAMES)
        assert report.feature_names == tuple(STATIC_FEATURE_NAMES)
        assert report.per_instance_phi.shape == (5, 6)
        for i in range(5):
            total = report.base_value + report.per_instance_phi[i].sum()
            assert total == pytest.approx(report.predictions[i], abs=1e-6)

    def test_temporal_branch_pins_static_input(self, trained, stage1_small):
        seq = stage1_small.sequence_matrix()
        static_pred = trained.hybrid.static.predict(stage1_small.static_matrix())
        report = E.temporal_branch_attribution(
            trained.hybrid.core, trained.hybrid.standardizer,
            float(static_pred.mean()), seq[-4:], seq, SEQUENCE_FEATURE_NAMES)
        assert report.per_instance_phi.shape == (4, 4)
        for i in range(4):
            total = report.base_value + report.per_instance_phi[i].sum()
            assert total == pytest.approx(report.predictions[i], abs=1e-6)

    def test_efficiency_attribution_on_stage2(self, trained, stage2_observed):
        X = stage2_observed.feature_matrix()
        report = E.efficiency_attribution(trained.eff_model, X[-3:], X,
                                          STAGE2_FEATURE_NAMES, mode="sampled",
                                          n_permutations=60, seed=1)
        assert report.per_instance_phi.shape == (3, 9)
        for i in range(3):
            total = report.base_value + report.per_instance_phi[i].sum()
            assert total == pytest.approx(report.predictions[i], abs=1e-6)


class TestSummaryCsv:
    def test_round_trip(self, tmp_path):
        import csv
        fn = linear_fn([1.0, 2.0])
        report = E.shapley_values(fn, np.ones((2, 2)), np.zeros((4, 2)), ["a", "b"])
        path = tmp_path / "phi.csv"
        E.write_summary_csv(report, path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert [r["feature"] for r in rows] == ["b", "a"]
        assert int(rows[0]["rank"]) == 1
