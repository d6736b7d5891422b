"""Dataset assembly: match-level splitting and input construction.

The split is by match, never by moment, mirroring the training
protocol: the first 80% of the ordered match list trains, the rest
validates. Split hygiene (no match on both sides) is asserted on every
assembly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from p3engine.detect import PENETRATIVE, P3Moment
from p3engine.model.features import extract_features
from p3engine.render import RenderConfig, raster_to_input, render_moment


@dataclass(frozen=True)
class SplitPolicy:
    match_ids: tuple[str, ...]  # ordered, deduplicated
    train_fraction: float = 0.8

    def split(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        if len(self.match_ids) < 2:
            raise ValueError("need at least 2 matches to split")
        cut = int(len(self.match_ids) * self.train_fraction)
        cut = min(max(cut, 1), len(self.match_ids) - 1)
        return self.match_ids[:cut], self.match_ids[cut:]


def policy_for(moments: Sequence[P3Moment], train_fraction: float = 0.8) -> SplitPolicy:
    ordered: list[str] = []
    seen: set[str] = set()
    for m in moments:
        if m.match_id not in seen:
            seen.add(m.match_id)
            ordered.append(m.match_id)
    return SplitPolicy(match_ids=tuple(ordered), train_fraction=train_fraction)


def split_moments(
    moments: Sequence[P3Moment], policy: SplitPolicy
) -> tuple[list[P3Moment], list[P3Moment]]:
    train_ids, val_ids = policy.split()
    train_set, val_set = set(train_ids), set(val_ids)
    assert not (train_set & val_set), "split hygiene violated: overlapping matches"
    train = [m for m in moments if m.match_id in train_set]
    val = [m for m in moments if m.match_id in val_set]
    return train, val


def labels_of(moments: Sequence[P3Moment]) -> np.ndarray:
    return np.array([1 if m.label == PENETRATIVE else 0 for m in moments], dtype=np.int64)


def features_and_labels(moments: Sequence[P3Moment]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([extract_features(m).as_array() for m in moments], dtype=np.float64)
    return x, labels_of(moments)


def render_inputs(moments: Sequence[P3Moment], size: int = 64) -> np.ndarray:
    """Render each moment at the classifier input size: (N, 3, size, size)."""
    cfg = RenderConfig(width=size, height=size)
    return np.stack([raster_to_input(render_moment(m, cfg)) for m in moments])


def model_render_config(input_shape: tuple[int, int, int]) -> RenderConfig:
    """The render settings that produce a model's input images."""
    return RenderConfig(width=input_shape[2], height=input_shape[1])
