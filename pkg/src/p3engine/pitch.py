"""Pitch coordinate conventions shared across the engine.

Coordinates follow the StatsBomb convention: a 120 x 80 pitch with the
acting team always attacking toward increasing x. Every snapshot is
normalized to this frame, so "forward" is +x everywhere downstream.
"""

from __future__ import annotations

import math

PITCH_LENGTH = 120.0
PITCH_WIDTH = 80.0

# Valid pass-origin band: beyond the defensive third, short of the last
# quarter of the pitch (boundaries inclusive).
ZONE_LO = PITCH_LENGTH / 3.0
ZONE_HI = PITCH_LENGTH * 3.0 / 4.0


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def clamp_to_pitch(x: float, y: float) -> tuple[float, float]:
    """Clamp a coordinate pair to pitch bounds."""
    return clamp(x, 0.0, PITCH_LENGTH), clamp(y, 0.0, PITCH_WIDTH)


def in_pitch(x: float, y: float) -> bool:
    return 0.0 <= x <= PITCH_LENGTH and 0.0 <= y <= PITCH_WIDTH


def round_half_up(value: float) -> int:
    """Round with .5 going up, not to even. Keeps pixel mapping bit-stable."""
    return int(math.floor(value + 0.5))
