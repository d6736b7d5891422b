"""Potential Penetrative Pass (P3) analytics engine.

Detects P3 moments from football event + 360 freeze-frame data, renders
them as pitch-control images, trains classifiers to predict whether a
moment becomes a penetrative pass, and aggregates player/team KPIs.
"""

__version__ = "0.1.0"
