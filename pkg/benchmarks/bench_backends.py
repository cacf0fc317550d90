"""Compare the numba and numpy kernel backends on the hot paths.

Usage:
    python benchmarks/bench_backends.py [--samples N] [--directions K] [--repeat R]

The first numba call per kernel is excluded (JIT compilation).  Note
that numpy 2.x ships SIMD-accelerated sorts, so the sort-dominated
quantile kernel can favor the numpy backend on some machines; the
loop-dominated exceedance kernel is where numba tends to win.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from envcontour.kernels import _numpy
try:
    from envcontour.kernels import _numba
except ImportError:
    _numba = None


def timeit(func, *args, repeat: int) -> float:
    func(*args)  # warmup; compiles on the numba path
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--directions", type=int, default=360)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    values = np.ascontiguousarray(rng.standard_normal((args.samples, 2)))
    theta = 2 * np.pi * np.arange(args.directions) / args.directions
    dirs = np.ascontiguousarray(np.stack([np.cos(theta), np.sin(theta)], axis=1))
    m = args.samples // 10
    thresholds = np.ascontiguousarray(np.full(args.directions, 1.28))
    y_asc = np.sort(rng.uniform(-3.0, 1.0, args.samples))

    cases = [
        ("directional_quantiles", (values, dirs, m)),
        ("exceedance_counts", (values, dirs, thresholds)),
        ("bpoe_min", (y_asc,)),
    ]

    print(f"N={args.samples}, K={args.directions}, best of {args.repeat}")
    print(f"{'kernel':<24}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, inputs in cases:
        t_np = timeit(getattr(_numpy, name), *inputs, repeat=args.repeat)
        if _numba is None:
            print(f"{name:<24}{t_np:>12.4f}{'n/a':>12}{'n/a':>10}")
            continue
        t_nb = timeit(getattr(_numba, name), *inputs, repeat=args.repeat)
        print(f"{name:<24}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.2f}x")


if __name__ == "__main__":
    main()
