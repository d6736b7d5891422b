"""Classifiers predicting whether a P3 moment becomes a penetrative pass.

Two routes: a logistic baseline on the three pre-pass event features,
and a small convolutional network on the rendered pitch-control image.
Both train deterministically from a seed and persist to the same
`.p3m` container format.
"""

from p3engine.model.baseline import BaselineModel, predict_baseline, train_baseline
from p3engine.model.cnn import (
    DEFAULT_ARCH,
    CnnModel,
    TrainCnnConfig,
    build_cnn,
    cnn_forward,
    cnn_forward_batch,
    gradient_check,
    param_count,
    train_cnn,
)
from p3engine.model.dataset import (
    SplitPolicy,
    features_and_labels,
    labels_of,
    policy_for,
    render_inputs,
    split_moments,
)
from p3engine.model.features import FEATURE_NAMES, FeatureVector, extract_features
from p3engine.model.persist import load_model, save_model
from p3engine.model.report import TrainReport

__all__ = [
    "BaselineModel",
    "CnnModel",
    "DEFAULT_ARCH",
    "FEATURE_NAMES",
    "FeatureVector",
    "SplitPolicy",
    "TrainCnnConfig",
    "TrainReport",
    "build_cnn",
    "cnn_forward",
    "cnn_forward_batch",
    "extract_features",
    "features_and_labels",
    "gradient_check",
    "labels_of",
    "load_model",
    "param_count",
    "policy_for",
    "predict_baseline",
    "render_inputs",
    "save_model",
    "split_moments",
    "train_baseline",
    "train_cnn",
]
