"""Hot numeric kernels with a compiled fast path.

The Cython extension is optional: when it is absent (source install
without a compiler) or when P3_PURE_PYTHON is set to a truthy value,
the numpy implementations take over. Both backends implement identical
semantics and are cross-checked by the test suite; `BACKEND` reports
which one is active.
"""

from __future__ import annotations

import os

import numpy as np

from p3engine.kernels import _purepy

if os.environ.get("P3_PURE_PYTHON", "0") not in ("", "0", "false", "no"):
    _impl = _purepy
    BACKEND = "python"
else:
    try:
        from p3engine.kernels import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _purepy
        BACKEND = "python"


def _f64(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.float64))


def voronoi_owners(px, py, seeds) -> np.ndarray:
    """(H, W) int32 nearest-seed indices; ties keep the lowest index."""
    return _impl.voronoi_owners(_f64(px), _f64(py), _f64(seeds))


def conv2d_fwd(x, w, b) -> np.ndarray:
    return _impl.conv2d_fwd(_f64(x), _f64(w), _f64(b))


def conv2d_bwd(x, w, gy):
    return _impl.conv2d_bwd(_f64(x), _f64(w), _f64(gy))


def maxpool2_fwd(x):
    return _impl.maxpool2_fwd(_f64(x))


def maxpool2_bwd(gy, idx):
    return _impl.maxpool2_bwd(_f64(gy), np.ascontiguousarray(idx, dtype=np.int32))
