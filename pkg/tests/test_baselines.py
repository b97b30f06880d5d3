import numpy as np
import pytest

import _oracles
from qnnbench.baselines import (
    DecisionTreeRegressor,
    KnnRegressor,
    LinearModel,
    TreeNode,
    ols_fit,
)


class TestKnn:
    def test_k_one_returns_nearest_target(self):
        model = KnnRegressor(k=1).fit([[0.0], [1.0], [2.0]], [10.0, 20.0, 30.0])
        np.testing.assert_allclose(model.predict([[0.9]]), [20.0])

    def test_k_equal_to_training_size_returns_global_mean(self, rng):
        X = rng.normal(size=(8, 3))
        y = rng.normal(size=8)
        model = KnnRegressor(k=8).fit(X, y)
        np.testing.assert_allclose(model.predict(rng.normal(size=(4, 3))), np.full(4, y.mean()))

    def test_matches_brute_force_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(6, 25))
            X = rng.normal(size=(n, 4))
            y = rng.normal(size=n)
            model = KnnRegressor(k=5, p=2.0).fit(X, y)
            queries = rng.normal(size=(3, 4))
            got = model.predict(queries)
            expected = [_oracles.knn_predict(X, y, q, k=5, p=2.0) for q in queries]
            np.testing.assert_allclose(got, expected, atol=1e-12)

    def test_distance_ties_prefer_lower_index(self):
        # two training points equidistant from the query
        model = KnnRegressor(k=1).fit([[1.0], [-1.0]], [111.0, 222.0])
        np.testing.assert_allclose(model.predict([[0.0]]), [111.0])

    def test_zero_training_error_with_k_one(self, rng):
        X = rng.normal(size=(20, 2))
        y = rng.normal(size=20)
        model = KnnRegressor(k=1).fit(X, y)
        np.testing.assert_allclose(model.predict(X), y)

    def test_minkowski_order_changes_neighbours(self):
        X = [[0.0, 0.0], [0.8, 0.8], [1.2, 0.0]]
        y = [0.0, 1.0, 2.0]
        query = [[0.0, 0.0]]
        # diagonal point: distance 1.6 under p=1 but ~1.13 under p=2
        np.testing.assert_allclose(KnnRegressor(k=2, p=1.0).fit(X, y).predict(query), [1.0])
        np.testing.assert_allclose(KnnRegressor(k=2, p=2.0).fit(X, y).predict(query), [0.5])

    def test_k_larger_than_training_rejected(self):
        with pytest.raises(ValueError):
            KnnRegressor(k=5).fit([[0.0]], [1.0])

    def test_empty_training_rejected(self):
        with pytest.raises(ValueError):
            KnnRegressor(k=1).fit(np.empty((0, 2)), [])

    def test_predict_before_fit_rejected(self):
        with pytest.raises(ValueError):
            KnnRegressor().predict([[1.0]])

    def test_json_round_trip(self, rng):
        X = rng.normal(size=(10, 2))
        y = rng.normal(size=10)
        model = KnnRegressor(k=3).fit(X, y)
        clone = KnnRegressor.from_dict(model.to_dict())
        queries = rng.normal(size=(5, 2))
        np.testing.assert_allclose(clone.predict(queries), model.predict(queries))


class TestDecisionTree:
    def test_single_sample_gives_root_leaf(self):
        model = DecisionTreeRegressor().fit([[3.0]], [7.0])
        assert model.root.is_leaf
        np.testing.assert_allclose(model.predict([[0.0], [100.0]]), [7.0, 7.0])

    def test_two_points_recovered_exactly(self):
        model = DecisionTreeRegressor().fit([[0.0], [1.0]], [0.0, 10.0])
        assert not model.root.is_leaf
        np.testing.assert_allclose(model.predict([[0.0], [1.0]]), [0.0, 10.0])

    def test_interpolates_distinct_inputs(self, rng):
        X = rng.normal(size=(50, 4))
        y = rng.normal(size=50)
        model = DecisionTreeRegressor().fit(X, y)
        np.testing.assert_allclose(model.predict(X), y, atol=0)

    def test_matches_recursive_partition_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(4, 16))
            X = rng.normal(size=(n, 3))
            y = rng.normal(size=n)
            model = DecisionTreeRegressor().fit(X, y)
            queries = rng.normal(size=(3, 3))
            got = model.predict(queries)
            expected = [_oracles.tree_predict(X, y, q) for q in queries]
            np.testing.assert_allclose(got, expected, atol=1e-12)

    def test_duplicate_inputs_predict_their_mean(self):
        X = [[1.0], [1.0], [2.0]]
        y = [4.0, 6.0, 9.0]
        model = DecisionTreeRegressor().fit(X, y)
        np.testing.assert_allclose(model.predict([[1.0]]), [5.0])

    def test_constant_features_give_leaf(self):
        model = DecisionTreeRegressor().fit([[2.0], [2.0]], [1.0, 3.0])
        assert model.root.is_leaf
        np.testing.assert_allclose(model.predict([[2.0]]), [2.0])

    def test_empty_training_rejected(self):
        with pytest.raises(ValueError):
            DecisionTreeRegressor().fit(np.empty((0, 1)), [])

    def test_json_round_trip(self, rng):
        X = rng.normal(size=(20, 2))
        y = rng.normal(size=20)
        model = DecisionTreeRegressor().fit(X, y)
        clone = DecisionTreeRegressor.from_dict(model.to_dict())
        queries = rng.normal(size=(10, 2))
        np.testing.assert_allclose(clone.predict(queries), model.predict(queries))


class TestOls:
    def test_exact_line_recovered(self):
        X = np.arange(10.0).reshape(-1, 1)
        y = 2.0 * X[:, 0] + 1.0
        model = ols_fit(X, y)
        np.testing.assert_allclose(model.weights, [2.0], atol=1e-10)
        np.testing.assert_allclose(model.intercept, 1.0, atol=1e-10)
        assert not model.rank_deficient

    def test_matches_normal_equations_oracle(self, rng):
        for _ in range(50):
            X = rng.normal(size=(30, 4))
            y = rng.normal(size=30)
            model = ols_fit(X, y)
            expected = _oracles.ols_normal_equations(X, y)
            np.testing.assert_allclose(model.weights, expected[:-1], atol=1e-8)
            np.testing.assert_allclose(model.intercept, expected[-1], atol=1e-8)

    def test_residuals_orthogonal_to_design(self, rng):
        X = rng.normal(size=(40, 4))
        y = rng.normal(size=40)
        model = ols_fit(X, y)
        residual = y - model.predict(X)
        design = np.column_stack([X, np.ones(len(y))])
        np.testing.assert_allclose(design.T @ residual, np.zeros(5), atol=1e-8)

    def test_constant_feature_flags_rank_deficiency(self):
        X = np.full((10, 1), 3.0)
        y = np.arange(10.0)
        model = ols_fit(X, y)
        assert model.rank_deficient
        np.testing.assert_allclose(model.predict(X), np.full(10, y.mean()), atol=1e-10)

    def test_too_few_samples_rejected(self):
        with pytest.raises(ValueError):
            ols_fit(np.ones((3, 4)), np.ones(3))

    def test_json_round_trip(self, rng):
        X = rng.normal(size=(30, 4))
        y = rng.normal(size=30)
        model = ols_fit(X, y)
        clone = LinearModel.from_dict(model.to_dict())
        np.testing.assert_allclose(clone.predict(X), model.predict(X))


class TestDeterminism:
    def test_all_models_deterministic_given_data(self, rng):
        X = rng.normal(size=(25, 4))
        y = rng.normal(size=25)
        queries = rng.normal(size=(5, 4))
        for build in (
            lambda: KnnRegressor(k=5).fit(X, y),
            lambda: DecisionTreeRegressor().fit(X, y),
            lambda: ols_fit(X, y),
        ):
            first = build().predict(queries)
            second = build().predict(queries)
            np.testing.assert_array_equal(first, second)
