"""Pre-pass event features.

The feature vector is deliberately tiny and closed: normalized pass
origin plus the pressure flag. Post-event information (end location,
body side, outcome) has no accessor here, so it can never leak into
training inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from p3engine.detect import P3Moment
from p3engine.pitch import PITCH_LENGTH, PITCH_WIDTH

FEATURE_NAMES = ("x", "y", "under_pressure")


@dataclass(frozen=True)
class FeatureVector:
    x: float
    y: float
    under_pressure: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.under_pressure], dtype=np.float64)


def extract_features(moment: P3Moment) -> FeatureVector:
    return FeatureVector(
        x=moment.origin[0] / PITCH_LENGTH,
        y=moment.origin[1] / PITCH_WIDTH,
        under_pressure=1.0 if moment.under_pressure else 0.0,
    )
