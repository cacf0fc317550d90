"""Pure-numpy implementations of the hot kernels.

Reference semantics for the numba backend: identical signatures, results
equal up to summation rounding.  Projections are accumulated per
direction so memory stays O(N) regardless of the direction count.
"""

from __future__ import annotations

import numpy as np


def directional_quantiles(values: np.ndarray, dirs: np.ndarray, m: int):
    """Per-direction empirical quantile and strict-tail mean.

    values : (N, n) sample matrix
    dirs   : (K, n) unit directions
    m      : exact tail index floor(N * alpha), 0 <= m < N

    Returns (c, cbar, tail_counts) with one entry per direction.  c[j] is
    the (m+1)-th largest projection onto dirs[j]; cbar[j] the mean of the
    projections strictly above c[j] (NaN when that tail is empty).
    """
    n_samples = values.shape[0]
    n_dirs = dirs.shape[0]
    c = np.empty(n_dirs)
    cbar = np.empty(n_dirs)
    tail_counts = np.empty(n_dirs, dtype=np.int64)
    for j in range(n_dirs):
        proj = values @ dirs[j]
        proj.sort()
        cj = proj[n_samples - 1 - m]
        start = int(np.searchsorted(proj, cj, side="right"))
        count = n_samples - start
        c[j] = cj
        tail_counts[j] = count
        cbar[j] = proj[start:].sum() / count if count > 0 else np.nan
    return c, cbar, tail_counts


def exceedance_counts(values: np.ndarray, dirs: np.ndarray, thresholds: np.ndarray):
    """Count samples whose projection strictly exceeds the per-direction threshold."""
    counts = np.empty(dirs.shape[0], dtype=np.int64)
    for j in range(dirs.shape[0]):
        counts[j] = int(np.count_nonzero(values @ dirs[j] > thresholds[j]))
    return counts


def bpoe_min(y_asc: np.ndarray) -> float:
    """Minimum of f(a) = mean(max(a*y + 1, 0)) over a >= 0, clamped to [0, 1].

    f is piecewise linear and convex in a with kinks at a = -1/y for the
    negative samples, so the minimum is attained at a = 0, at a kink, or
    in the a -> inf limit.  That limit is finite only when no sample is
    strictly positive, where it equals the fraction of samples >= 0.

    y_asc must be sorted ascending.
    """
    n = y_asc.shape[0]
    best = 1.0  # f(0)
    if y_asc[-1] <= 0.0:
        i_zero = int(np.searchsorted(y_asc, 0.0, side="left"))
        best = min(best, (n - i_zero) / n)
    n_neg = int(np.searchsorted(y_asc, 0.0, side="left"))
    if n_neg > 0:
        neg = y_asc[:n_neg]
        with np.errstate(divide="ignore", over="ignore"):
            a = -1.0 / neg
        finite = np.isfinite(a)
        if np.any(finite):
            a = a[finite]
            # terms strictly above each breakpoint sample, via suffix sums
            idx = np.searchsorted(y_asc, neg[finite], side="right")
            suffix = np.zeros(n + 1)
            suffix[:n] = np.cumsum(y_asc[::-1])[::-1]
            with np.errstate(over="ignore", invalid="ignore"):
                f = (a * suffix[idx] + (n - idx)) / n
            f = f[~np.isnan(f)]
            if f.size:
                best = min(best, float(f.min()))
    return min(1.0, max(0.0, best))
