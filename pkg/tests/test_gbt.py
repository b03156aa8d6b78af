"""Tests for the boosted-tree baseline."""

import numpy as np
import pytest

from aeroamp.errors import DimensionMismatch, EmptyGrid, NoSamples, TooFewFlights
from aeroamp.estimation import evaluate_are, fit_regime_models
from aeroamp.gbt import (
    FEATURES,
    GbtParams,
    HyperGrid,
    cv_grid_search,
    evaluate_gbt,
    predict_gbt,
    train_gbt,
    train_regime_models,
)
from tests.conftest import make_observations


def _flights(law, n, seed):
    """Observations whose only varying feature is induced power."""
    rng = np.random.default_rng(seed)
    p = rng.uniform(180.0, 280.0, n)
    return make_observations(p, law(p) + rng.normal(0.0, 2.0, n))


def _split(observations, n_train):
    train = [o for o in observations if o.flight_id <= n_train]
    test = [o for o in observations if o.flight_id > n_train]
    return train, test


class TestTrainGbt:
    """Single ensembles."""

    def test_loss_non_increasing(self):
        """Test training loss never rises from round to round."""
        rng = np.random.default_rng(0)
        x = rng.uniform(0.0, 1.0, (80, 3))
        y = np.sin(6.0 * x[:, 0]) + x[:, 1] ** 2 + rng.normal(0.0, 0.1, 80)
        model = train_gbt(x, y, GbtParams(learning_rate=0.3, max_depth=3, gamma=0.0), rounds=40)
        assert len(model.train_loss) == 40
        assert np.all(np.diff(model.train_loss) <= 1e-12)
        assert model.train_loss[-1] < np.var(y)

    def test_step_function(self):
        """Test one full-rate stump fits a step exactly."""
        x = np.linspace(0.0, 1.0, 20).reshape(-1, 1)
        y = np.where(x[:, 0] < 0.5, 0.0, 10.0)
        params = GbtParams(learning_rate=1.0, max_depth=1, gamma=0.0, subsample_rows=1.0)
        model = train_gbt(x, y, params, rounds=1)
        assert predict_gbt(model, [0.1]) == pytest.approx(0.0)
        assert predict_gbt(model, [0.9]) == pytest.approx(10.0)

    def test_gamma_blocks_splits(self):
        """Test a huge split threshold leaves the base prediction."""
        x = np.linspace(0.0, 1.0, 20).reshape(-1, 1)
        y = np.where(x[:, 0] < 0.5, 0.0, 10.0)
        model = train_gbt(x, y, GbtParams(learning_rate=1.0, max_depth=3, gamma=1e9), rounds=5)
        assert predict_gbt(model, [0.1]) == pytest.approx(5.0)
        assert all(len(tree.nodes) == 1 for tree in model.trees)

    def test_constant_target(self):
        """Test a constant target is predicted exactly."""
        x = np.random.default_rng(1).uniform(size=(30, 2))
        model = train_gbt(x, np.full(30, 7.0), GbtParams(0.1, 4, 0.0), rounds=10)
        assert predict_gbt(model, [0.5, 0.5]) == pytest.approx(7.0)

    def test_deterministic(self):
        """Test the same seed grows the same ensemble."""
        rng = np.random.default_rng(2)
        x, y = rng.uniform(size=(50, 3)), rng.uniform(size=50)
        params = GbtParams(0.1, 3, 0.0)
        first = train_gbt(x, y, params, rounds=20, seed=4)
        second = train_gbt(x, y, params, rounds=20, seed=4)
        assert predict_gbt(first, x[0]) == predict_gbt(second, x[0])
        assert first.train_loss == second.train_loss

    def test_feature_names(self):
        """Test names fall back to positions when they do not fit."""
        x = np.random.default_rng(3).uniform(size=(10, 2))
        model = train_gbt(x, x[:, 0], GbtParams(0.1, 2, 0.0), rounds=2)
        assert model.features == ("f0", "f1")

    def test_dimension_mismatch(self):
        """Test predicting with the wrong feature count fails."""
        x = np.random.default_rng(4).uniform(size=(10, 2))
        model = train_gbt(x, x[:, 0], GbtParams(0.1, 2, 0.0), rounds=2)
        with pytest.raises(DimensionMismatch):
            predict_gbt(model, [1.0, 2.0, 3.0])

    def test_too_few_samples(self):
        """Test one sample cannot be boosted."""
        with pytest.raises(NoSamples):
            train_gbt(np.ones((1, 2)), [1.0], GbtParams(0.1, 2, 0.0))


class TestHyperGrid:
    """Grid definition and enumeration."""

    def test_default_size(self):
        """Test the default grid has 27 points."""
        assert len(HyperGrid().points()) == 27

    def test_order(self):
        """Test points ascend by depth, then learning rate, then gamma."""
        points = HyperGrid().points()
        assert points[0] == GbtParams(learning_rate=0.05, max_depth=2, gamma=0.0)
        assert points[1].gamma == 1.0
        assert points[3].learning_rate == 0.1
        assert points[9].max_depth == 4

    def test_empty_dimension(self):
        """Test every dimension needs a value."""
        with pytest.raises(EmptyGrid):
            HyperGrid(learning_rates=())


class TestRegimeModels:
    """Per-regime ensembles against the linear model."""

    def test_linear_data_is_adequate(self):
        """Test the linear model is within two points of the trees on linear data."""
        train, test = _split(_flights(lambda p: 1.69 * p + 16.8, 80, seed=5), 60)
        linear = evaluate_are(test, fit_regime_models(train, replications=20))
        trees = train_regime_models(train, GbtParams(0.3, 2, 0.0), rounds=100)
        boosted = evaluate_gbt(test, trees)
        assert abs(linear.mean - boosted.mean) < 0.02

    def test_trees_win_on_curved_data(self):
        """Test the trees beat a straight line on a strongly quadratic law."""
        train, test = _split(_flights(lambda p: 0.05 * (p - 230.0) ** 2 + 300.0, 80, seed=6), 60)
        linear = evaluate_are(test, fit_regime_models(train, replications=20))
        trees = train_regime_models(train, GbtParams(0.3, 3, 0.0), rounds=100)
        assert evaluate_gbt(test, trees).mean < linear.mean

    def test_all_features(self):
        """Test the default feature set is read from observations."""
        train, _ = _split(_flights(lambda p: 2.0 * p, 20, seed=7), 20)
        trees = train_regime_models(train, GbtParams(0.3, 2, 0.0), rounds=5)
        assert all(model.features == FEATURES for model in trees.values())


class TestGridSearch:
    """Cross-validated tuning."""

    def test_picks_a_grid_point(self):
        """Test the search reports every fold and retrains the winner."""
        observations = _flights(lambda p: 1.69 * p + 16.8, 25, seed=8)
        grid = HyperGrid(learning_rates=(0.1, 0.3), max_depths=(2,), gammas=(0.0,))
        result = cv_grid_search(observations, grid, folds=5, rounds=20)
        assert result.best in grid.points()
        assert len(result.table) == 2 * 5
        assert set(result.models) == {o.regime for o in observations}
        assert result.mean_are(result.best.label) == min(
            result.mean_are(p.label) for p in grid.points()
        )

    def test_ties_prefer_shallow_then_slow(self):
        """Test equal errors pick the smaller depth, then the smaller learning rate."""
        observations = make_observations(np.linspace(180.0, 280.0, 10), np.full(10, 400.0))
        grid = HyperGrid(learning_rates=(0.3, 0.1), max_depths=(4, 2), gammas=(1.0, 0.0))
        result = cv_grid_search(observations, grid, folds=5, rounds=3)
        assert {are for _, _, are in result.table} == {0.0}
        assert result.best == GbtParams(learning_rate=0.1, max_depth=2, gamma=0.0)

    def test_logs_search_size(self, caplog):
        """Test the search announces how many ensembles it grows."""
        observations = _flights(lambda p: p, 10, seed=3)
        with caplog.at_level("INFO", logger="aeroamp"):
            cv_grid_search(observations, HyperGrid((0.3,), (2,), (0.0,)), folds=5, rounds=2)
        assert "1 points x 5 folds x 3 regimes x 2 rounds" in caplog.text

    def test_too_few_flights(self):
        """Test fewer flights than folds is rejected."""
        observations = _flights(lambda p: p, 3, seed=9)
        with pytest.raises(TooFewFlights):
            cv_grid_search(observations, HyperGrid((0.1,), (2,), (0.0,)), folds=5)
