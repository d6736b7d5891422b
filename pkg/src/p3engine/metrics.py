"""Classifier evaluation toolkit: ROC/AUC, operating threshold,
confusion matrix, score distribution, and quantile calibration.

AUC is the headline metric because it is insensitive to the heavy
class imbalance of penetrative-pass data. The operating threshold is
the curve point nearest the ideal corner (fpr 0, tpr 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from p3engine.jsonio import write_json


@dataclass(frozen=True)
class RocPoint:
    fpr: float
    tpr: float
    threshold: float  # math.inf on the (0,0) anchor


@dataclass
class RocCurve:
    points: list[RocPoint]
    auc: float

    def to_json(self) -> dict:
        return {
            "auc": self.auc,
            "points": [
                {
                    "fpr": p.fpr,
                    "tpr": p.tpr,
                    "threshold": None if math.isinf(p.threshold) else p.threshold,
                }
                for p in self.points
            ],
        }


@dataclass
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int
    threshold: float

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def tpr(self) -> float | None:
        pos = self.tp + self.fn
        return self.tp / pos if pos else None

    @property
    def fpr(self) -> float | None:
        neg = self.fp + self.tn
        return self.fp / neg if neg else None

    @property
    def precision(self) -> float | None:
        pred_pos = self.tp + self.fp
        return self.tp / pred_pos if pred_pos else None

    def to_json(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "total": self.total,
            "tpr": self.tpr,
            "fpr": self.fpr,
            "precision": self.precision,
            "threshold": self.threshold,
        }


@dataclass(frozen=True)
class CalibrationBin:
    index: int
    count: int
    mean_predicted: float
    observed_rate: float


@dataclass
class ScoreDistribution:
    bin_width: float
    counts: list[int]
    median: float

    def to_json(self) -> dict:
        return {"bin_width": self.bin_width, "counts": self.counts, "median": self.median}


def _validate(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if s.shape != y.shape or s.ndim != 1 or s.size == 0:
        raise ValueError("scores and labels must be equal-length 1-d and nonempty")
    return s, y


def roc_curve(scores: Sequence[float], labels: Sequence[int]) -> RocCurve:
    """Sweep distinct score thresholds descending, ties grouped.

    The curve runs from (0,0) (threshold above every score, anchored at
    +inf) to (1,1); AUC is the trapezoid integral.
    """
    s, y = _validate(scores, labels)
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_curve needs both classes present")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    points = [RocPoint(0.0, 0.0, math.inf)]
    auc = 0.0
    tp = fp = 0
    prev_fpr, prev_tpr = 0.0, 0.0
    i = 0
    n = s.size
    while i < n:
        j = i
        while j < n and s_sorted[j] == s_sorted[i]:
            j += 1
        tp += int((y_sorted[i:j] == 1).sum())
        fp += int((y_sorted[i:j] == 0).sum())
        fpr = fp / n_neg
        tpr = tp / n_pos
        points.append(RocPoint(fpr, tpr, float(s_sorted[i])))
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0
        prev_fpr, prev_tpr = fpr, tpr
        i = j
    return RocCurve(points=points, auc=auc)


def select_threshold(curve: RocCurve) -> float:
    """Threshold of the point nearest (fpr 0, tpr 1); ties prefer the
    higher threshold."""
    best_d2 = math.inf
    best_thr = math.inf
    for p in curve.points:
        d2 = p.fpr * p.fpr + (1.0 - p.tpr) * (1.0 - p.tpr)
        if d2 < best_d2 or (d2 == best_d2 and p.threshold > best_thr):
            best_d2 = d2
            best_thr = p.threshold
    return best_thr


def confusion(scores: Sequence[float], labels: Sequence[int], threshold: float) -> ConfusionMatrix:
    """Predicted positive iff score >= threshold."""
    s, y = _validate(scores, labels)
    pred = s >= threshold
    return ConfusionMatrix(
        tp=int((pred & (y == 1)).sum()),
        fp=int((pred & (y == 0)).sum()),
        tn=int((~pred & (y == 0)).sum()),
        fn=int((~pred & (y == 1)).sum()),
        threshold=threshold,
    )


def score_distribution(scores: Sequence[float], bin_width: float = 0.05) -> ScoreDistribution:
    """Fixed-width histogram over [0, 1] plus the exact median."""
    s = np.asarray(scores, dtype=np.float64)
    if s.size == 0:
        raise ValueError("score_distribution needs at least one score")
    n_bins = round(1.0 / bin_width)
    idx = np.minimum((s // bin_width).astype(int), n_bins - 1)
    counts = np.bincount(np.maximum(idx, 0), minlength=n_bins).tolist()
    ordered = np.sort(s)
    mid = s.size // 2
    median = float(ordered[mid]) if s.size % 2 else float((ordered[mid - 1] + ordered[mid]) / 2.0)
    return ScoreDistribution(bin_width=bin_width, counts=counts, median=median)


def calibration(
    scores: Sequence[float], labels: Sequence[int], n_bins: int = 10
) -> list[CalibrationBin]:
    """Equal-frequency calibration bins in score order.

    Bin sizes differ by at most one (larger bins first). Raises when
    there are fewer samples than bins.
    """
    s, y = _validate(scores, labels)
    if s.size < n_bins:
        raise ValueError(f"need at least {n_bins} samples for {n_bins} bins")
    order = np.argsort(s, kind="stable")
    bins: list[CalibrationBin] = []
    base, extra = divmod(s.size, n_bins)
    start = 0
    for i in range(n_bins):
        size = base + (1 if i < extra else 0)
        chunk = order[start : start + size]
        bins.append(
            CalibrationBin(
                index=i,
                count=size,
                mean_predicted=float(s[chunk].mean()),
                observed_rate=float(y[chunk].mean()),
            )
        )
        start += size
    return bins


def calibration_to_json(bins: Sequence[CalibrationBin]) -> dict:
    return {
        "bins": [
            {
                "index": b.index,
                "count": b.count,
                "mean_predicted": b.mean_predicted,
                "observed_rate": b.observed_rate,
            }
            for b in bins
        ]
    }


def write_eval_artifacts(
    out_dir: Path,
    curve: RocCurve,
    matrix: ConfusionMatrix,
    bins: Sequence[CalibrationBin],
    hist: ScoreDistribution,
) -> None:
    """Persist the four evaluation artifacts consumed by the service/UI."""
    out_dir = Path(out_dir)
    write_json(out_dir / "roc.json", curve.to_json())
    write_json(out_dir / "confusion.json", matrix.to_json())
    write_json(out_dir / "calibration.json", calibration_to_json(bins))
    write_json(out_dir / "histogram.json", hist.to_json())
