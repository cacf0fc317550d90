"""Numba-compiled kernels; same contracts as the numpy backend.

Per-direction work is independent, so the direction loops run under
``prange`` with each iteration writing its own output slot -- results do
not depend on thread scheduling.  Compiled objects are disk-cached.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def directional_quantiles(values, dirs, m):
    n_samples, n_dim = values.shape
    n_dirs = dirs.shape[0]
    c = np.empty(n_dirs)
    cbar = np.empty(n_dirs)
    tail_counts = np.empty(n_dirs, dtype=np.int64)
    for j in prange(n_dirs):
        proj = np.empty(n_samples)
        for i in range(n_samples):
            acc = 0.0
            for d in range(n_dim):
                acc += values[i, d] * dirs[j, d]
            proj[i] = acc
        proj.sort()
        cj = proj[n_samples - 1 - m]
        start = np.searchsorted(proj, cj, side="right")
        count = n_samples - start
        c[j] = cj
        tail_counts[j] = count
        if count > 0:
            acc = 0.0
            for i in range(start, n_samples):
                acc += proj[i]
            cbar[j] = acc / count
        else:
            cbar[j] = np.nan
    return c, cbar, tail_counts


@njit(cache=True, parallel=True)
def exceedance_counts(values, dirs, thresholds):
    n_samples, n_dim = values.shape
    n_dirs = dirs.shape[0]
    counts = np.empty(n_dirs, dtype=np.int64)
    for j in prange(n_dirs):
        cnt = 0
        for i in range(n_samples):
            acc = 0.0
            for d in range(n_dim):
                acc += values[i, d] * dirs[j, d]
            if acc > thresholds[j]:
                cnt += 1
        counts[j] = cnt
    return counts


@njit(cache=True)
def bpoe_min(y_asc):
    n = y_asc.shape[0]
    best = 1.0  # f(0)
    i_zero = np.searchsorted(y_asc, 0.0, side="left")
    if y_asc[n - 1] <= 0.0:
        limit = (n - i_zero) / n
        if limit < best:
            best = limit
    # suffix[i] = sum(y_asc[i:]), accumulated in ascending-index order
    suffix = np.zeros(n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + y_asc[i]
    for k in range(i_zero):
        a = -1.0 / y_asc[k]
        if not np.isfinite(a):
            continue
        idx = np.searchsorted(y_asc, y_asc[k], side="right")
        f = (a * suffix[idx] + (n - idx)) / n
        if not np.isnan(f) and f < best:
            best = f
    if best < 0.0:
        best = 0.0
    if best > 1.0:
        best = 1.0
    return best
