"""Logistic baseline trained solely on pre-pass event features.

Full-batch gradient descent on binary cross-entropy. Weights are held
at float32 precision (the on-disk format), so a save/load round trip
reproduces predictions bit-exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from p3engine.metrics import roc_curve
from p3engine.model.features import FEATURE_NAMES, FeatureVector
from p3engine.model.report import TrainReport


def quantize32(arr: np.ndarray) -> np.ndarray:
    """Round values to float32 precision, kept in float64 storage."""
    return arr.astype(np.float32).astype(np.float64)


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def bce_from_logits(z: np.ndarray, y: np.ndarray) -> float:
    """Numerically stable mean binary cross-entropy."""
    per = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    return float(per.mean())


@dataclass
class BaselineModel:
    weights: np.ndarray = field(default_factory=lambda: np.zeros(len(FEATURE_NAMES)))
    bias: float = 0.0
    seed: int = 0
    trained: bool = False

    def logits(self, x: np.ndarray) -> np.ndarray:
        return x @ self.weights + self.bias


def _check_dataset(x: np.ndarray, y: np.ndarray) -> None:
    if x.ndim != 2 or x.shape[1] != len(FEATURE_NAMES):
        raise ValueError(f"expected (n, {len(FEATURE_NAMES)}) features")
    if len(np.unique(y)) < 2:
        raise ValueError("degenerate labels: both classes must be present")


def train_baseline(
    x: np.ndarray,
    y: np.ndarray,
    lr: float = 1.0,
    epochs: int = 500,
    seed: int = 0,
    val: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[BaselineModel, TrainReport]:
    """Fit the logistic baseline deterministically.

    Zero initialization (the BCE objective is convex, randomness adds
    nothing); the seed is recorded for manifest provenance.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_dataset(x, y)
    start = time.perf_counter()
    model = BaselineModel(seed=seed)
    report = TrainReport()
    n = x.shape[0]
    for _ in range(epochs):
        z = model.logits(x)
        report.train_losses.append(bce_from_logits(z, y))
        g = sigmoid(z) - y
        model.weights = quantize32(model.weights - lr * (x.T @ g) / n)
        model.bias = float(np.float32(model.bias - lr * g.mean()))
        if val is not None:
            report.val_losses.append(bce_from_logits(model.logits(val[0]), val[1]))
    model.trained = True
    report.epochs = epochs
    report.wall_clock_s = time.perf_counter() - start
    report.train_auc = roc_curve(sigmoid(model.logits(x)), y.astype(int)).auc
    if val is not None:
        report.val_auc = roc_curve(sigmoid(model.logits(val[0])), val[1].astype(int)).auc
    return model, report


def predict_baseline(model: BaselineModel, features: FeatureVector | np.ndarray) -> float:
    """Probability the moment becomes a penetrative pass."""
    arr = features.as_array() if isinstance(features, FeatureVector) else np.asarray(features)
    return float(sigmoid(np.atleast_1d(arr @ model.weights + model.bias))[0])


def predict_baseline_batch(model: BaselineModel, x: np.ndarray) -> np.ndarray:
    return sigmoid(model.logits(np.asarray(x, dtype=np.float64)))
