"""Benchmark the compiled kernels against the numpy fallback.

Run: python3 benchmarks/bench_kernels.py [--repeats N]

Times the two hot paths (voronoi rasterization for rendering, conv/pool
forward+backward for training) on representative shapes and prints the
ratio. Build the extension first: python3 setup.py build_ext --inplace
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from p3engine.kernels import _purepy

try:
    from p3engine.kernels import _fast
except ImportError:
    _fast = None


def best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cases():
    rng = np.random.default_rng(0)
    h = w = 224
    rows = np.arange(h, dtype=np.float64)[:, None]
    cols = np.arange(w, dtype=np.float64)[None, :]
    px = np.ascontiguousarray(np.broadcast_to((h - 1 - rows) / (h - 1) * 120.0, (h, w)))
    py = np.ascontiguousarray(np.broadcast_to(cols / (w - 1) * 80.0, (h, w)))
    seeds = np.ascontiguousarray(rng.uniform(0, 80, (22, 2)))
    yield "voronoi 224x224, 22 seeds", lambda impl: impl.voronoi_owners(px, py, seeds)

    x = rng.uniform(0, 1, (16, 3, 64, 64))
    wgt = rng.normal(size=(8, 3, 3, 3)) * 0.1
    b = np.zeros(8)
    yield "conv fwd 16x3x64x64 -> 8", lambda impl: impl.conv2d_fwd(x, wgt, b)

    gy = rng.normal(size=(16, 8, 64, 64))
    yield "conv bwd 16x3x64x64 -> 8", lambda impl: impl.conv2d_bwd(x, wgt, gy)

    xp = rng.normal(size=(16, 8, 64, 64))
    yield "maxpool fwd 16x8x64x64", lambda impl: impl.maxpool2_fwd(xp)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _fast is None:
        print("compiled kernels not built; only timing the numpy fallback")
    header = f"{'kernel':34} {'numpy':>10} {'cython':>10} {'ratio':>8}"
    print(header)
    print("-" * len(header))
    for name, fn in cases():
        t_py = best_of(lambda: fn(_purepy), args.repeats)
        if _fast is not None:
            t_cy = best_of(lambda: fn(_fast), args.repeats)
            ratio = t_py / t_cy
            print(f"{name:34} {t_py * 1e3:8.2f}ms {t_cy * 1e3:8.2f}ms {ratio:7.2f}x")
        else:
            print(f"{name:34} {t_py * 1e3:8.2f}ms {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
