"""Pure-numpy implementations of the hot kernels.

Semantics must stay in lockstep with the Cython versions in _fast.pyx:
the test suite cross-checks both backends, and the voronoi kernel is
required to agree bit-for-bit (same IEEE operation per element, strict
less-than comparison, lowest seed index wins ties).
"""

from __future__ import annotations

import numpy as np


def voronoi_owners(px: np.ndarray, py: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """Nearest-seed index for every grid cell.

    px, py: (H, W) float64 pitch coordinates of cell centers.
    seeds:  (N, 2) float64 seed positions, N >= 1.
    Returns (H, W) int32 owner indices; exact distance ties keep the
    lowest seed index.
    """
    dx = px - seeds[0, 0]
    dy = py - seeds[0, 1]
    best = dx * dx + dy * dy
    owners = np.zeros(px.shape, dtype=np.int32)
    for k in range(1, seeds.shape[0]):
        dx = px - seeds[k, 0]
        dy = py - seeds[k, 1]
        d = dx * dx + dy * dy
        closer = d < best
        owners[closer] = k
        best[closer] = d[closer]
    return owners


def conv2d_fwd(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Same-padded stride-1 cross-correlation.

    x: (N, C, H, W), w: (F, C, KH, KW) with odd KH/KW, b: (F,).
    Returns (N, F, H, W).
    """
    kh, kw = w.shape[2], w.shape[3]
    ph, pw = (kh - 1) // 2, (kw - 1) // 2
    xp = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    win = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3))
    # win: (N, C, H, W, KH, KW); contract C, KH, KW against w.
    y = np.tensordot(win, w, axes=([1, 4, 5], [1, 2, 3]))
    return np.ascontiguousarray(y.transpose(0, 3, 1, 2)) + b[None, :, None, None]


def conv2d_bwd(
    x: np.ndarray, w: np.ndarray, gy: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of conv2d_fwd wrt input, weights, and bias."""
    kh, kw = w.shape[2], w.shape[3]
    ph, pw = (kh - 1) // 2, (kw - 1) // 2
    xp = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    win = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3))
    # gw[f,c,i,j] = sum_{n,h,w} gy[n,f,h,w] * win[n,c,h,w,i,j]
    gw = np.tensordot(gy, win, axes=([0, 2, 3], [0, 2, 3]))
    gb = gy.sum(axis=(0, 2, 3))
    # gx: full correlation of gy with the 180-degree-rotated kernels.
    gyp = np.pad(gy, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    gwin = np.lib.stride_tricks.sliding_window_view(gyp, (kh, kw), axis=(2, 3))
    wr = w[:, :, ::-1, ::-1]
    gx = np.tensordot(gwin, wr, axes=([1, 4, 5], [0, 2, 3]))
    return np.ascontiguousarray(gx.transpose(0, 3, 1, 2)), gw, gb


def maxpool2_fwd(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """2x2 stride-2 max pooling. H and W must be even.

    Returns (y, idx) where idx in {0..3} encodes the argmax position
    within each window in row-major order; ties keep the first.
    """
    n, c, h, w = x.shape
    tiles = x.reshape(n, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5)
    flat = tiles.reshape(n, c, h // 2, w // 2, 4)
    idx = flat.argmax(axis=-1).astype(np.int32)
    y = np.take_along_axis(flat, idx[..., None].astype(np.int64), axis=-1)[..., 0]
    return np.ascontiguousarray(y), idx


def maxpool2_bwd(gy: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Scatter pooled gradients back to the pre-pool shape."""
    n, c, ho, wo = gy.shape
    flat = np.zeros((n, c, ho, wo, 4), dtype=gy.dtype)
    np.put_along_axis(flat, idx[..., None].astype(np.int64), gy[..., None], axis=-1)
    tiles = flat.reshape(n, c, ho, wo, 2, 2).transpose(0, 1, 2, 4, 3, 5)
    return np.ascontiguousarray(tiles.reshape(n, c, ho * 2, wo * 2))
