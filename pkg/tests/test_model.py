"""Model tests: feature extraction and the logistic baseline."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from p3engine.detect import detect_p3
from p3engine.model import FEATURE_NAMES, extract_features, predict_baseline, train_baseline
from p3engine.model.baseline import BaselineModel, predict_baseline_batch
from tests.conftest import make_snapshot


class TestFeatures:
    def test_normalized_triple(self):
        moment = detect_p3(make_snapshot(origin=(60.0, 40.0), under_pressure=True))
        f = extract_features(moment)
        assert (f.x, f.y, f.under_pressure) == (0.5, 0.5, 1.0)

    def test_zone_left_edge(self):
        moment = detect_p3(make_snapshot(origin=(40.0, 1.0), under_pressure=False))
        f = extract_features(moment)
        assert f.x == pytest.approx(1 / 3)
        assert f.under_pressure == 0.0

    def test_arity_is_three_and_closed(self):
        # the leakage guard: exactly three fields, none of them post-event
        fields = [f.name for f in dataclasses.fields(extract_features(detect_p3(make_snapshot())))]
        assert tuple(fields) == FEATURE_NAMES == ("x", "y", "under_pressure")
        moment = detect_p3(make_snapshot())
        assert extract_features(moment).as_array().shape == (3,)


class TestBaseline:
    def _separable(self, n=200, seed=0):
        # positives at x > 0.5, with a small margin so finite-epoch GD
        # can realize the perfect ranking
        rng = np.random.default_rng(seed)
        x = rng.uniform(0, 1, (n, 3))
        x[:, 0] = np.where(x[:, 0] > 0.5, 0.55 + 0.45 * (x[:, 0] - 0.5) / 0.5,
                           0.45 * x[:, 0] / 0.5)
        y = (x[:, 0] > 0.5).astype(float)
        return x, y

    def test_separable_reaches_auc_one(self):
        x, y = self._separable()
        model, report = train_baseline(x, y, epochs=500)
        assert report.train_auc == 1.0

    def test_coin_flip_labels_stay_near_half(self):
        rng = np.random.default_rng(101)
        x = rng.uniform(0, 1, (2000, 3))
        y = rng.integers(0, 2, 2000).astype(float)
        xv = rng.uniform(0, 1, (2000, 3))
        yv = rng.integers(0, 2, 2000).astype(float)
        _, report = train_baseline(x, y, epochs=200, val=(xv, yv))
        assert 0.45 <= report.val_auc <= 0.55

    def test_single_class_rejected(self):
        x = np.random.default_rng(0).uniform(0, 1, (50, 3))
        with pytest.raises(ValueError, match="degenerate labels"):
            train_baseline(x, np.ones(50))

    def test_zero_model_predicts_half(self):
        model = BaselineModel()
        assert predict_baseline(model, np.array([0.3, 0.9, 1.0])) == 0.5

    def test_bias_monotonicity(self):
        f = np.array([0.5, 0.5, 0.0])
        lo = predict_baseline(BaselineModel(bias=0.0), f)
        hi = predict_baseline(BaselineModel(bias=5.0), f)
        assert hi > lo

    def test_matches_hand_computed_sigmoid(self):
        model = BaselineModel(weights=np.array([0.5, -0.25, 1.0]), bias=0.125)
        f = np.array([0.5, 0.5, 1.0])
        z = 0.5 * 0.5 - 0.25 * 0.5 + 1.0 * 1.0 + 0.125
        assert predict_baseline(model, f) == pytest.approx(1 / (1 + math.exp(-z)), abs=1e-12)

    def test_deterministic_given_seed(self):
        x, y = self._separable()
        m1, r1 = train_baseline(x, y, epochs=50, seed=9)
        m2, r2 = train_baseline(x, y, epochs=50, seed=9)
        assert np.array_equal(m1.weights, m2.weights) and m1.bias == m2.bias
        assert r1.train_losses == r2.train_losses

    def test_losses_finite_and_decreasing_overall(self):
        x, y = self._separable()
        _, report = train_baseline(x, y, epochs=100)
        assert all(math.isfinite(v) for v in report.train_losses)
        assert report.train_losses[-1] <= report.train_losses[0]

    def test_batch_prediction_in_open_interval(self):
        x, y = self._separable()
        model, _ = train_baseline(x, y, epochs=100)
        p = predict_baseline_batch(model, x)
        assert ((p > 0) & (p < 1)).all()
