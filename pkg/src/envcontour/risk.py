"""Empirical risk measures on finite sample sets.

All measures follow the loss orientation: large values are bad.  For a
sample y_1 >= ... >= y_N and a risk level ``alpha`` in (0, 1):

* ``value_at_risk`` is the smallest x whose empirical exceedance
  probability P(X > x) is at most alpha.  On sorted samples this is the
  (m+1)-th largest value with m = floor(N * alpha); the tie-aware
  characterization P(X > v) <= alpha < P(X >= v) holds exactly.
* ``conditional_value_at_risk`` averages the value-at-risk over levels
  (0, alpha]: the empirical quantile function is a step function, so the
  integral evaluates in closed form as the mean of the m largest values
  plus a fractional contribution from the (m+1)-th.
* ``superquantile_above`` is the mean of the samples strictly above a
  threshold (the conditional tail expectation).
* ``buffered_failure_probability`` is the buffered probability that the
  value exceeds zero: the minimum over a >= 0 of mean(max(a*y + 1, 0)).
  It always dominates the plain exceedance fraction P(X > 0).

The tail index m is computed with exact rational arithmetic.  Floating
``floor(N * alpha)`` can land on the wrong side of an integer (for
example ``floor(10 * 0.3)`` is 3 although 10 * float(0.3) < 3), which
would silently break the quantile characterization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import EmptyTailError

__all__ = [
    "RiskLevel",
    "EmpiricalDistribution",
    "as_risk_level",
    "tail_index",
    "value_at_risk",
    "conditional_value_at_risk",
    "superquantile_above",
    "buffered_failure_probability",
    "buffered_failure_probability_scan",
]


@dataclass(frozen=True)
class RiskLevel:
    """Acceptable probability of an unacceptable outcome, in (0, 1)."""

    alpha: float

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or not 0.0 < alpha < 1.0:
            raise ValueError(f"risk level must lie strictly in (0, 1), got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)


def as_risk_level(level) -> RiskLevel:
    """Coerce a float or RiskLevel to a validated RiskLevel."""
    if isinstance(level, RiskLevel):
        return level
    return RiskLevel(float(level))


class EmpiricalDistribution:
    """A finite sample treated as an equal-weight discrete distribution.

    Values are sorted on construction; ``sorted_desc`` exposes them
    non-increasing, the convention used throughout this module.
    """

    __slots__ = ("_sorted_asc",)

    def __init__(self, values):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.ndim != 1:
            raise ValueError(f"expected a 1-D sample vector, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("empirical distribution requires at least one sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite (no NaN or infinity)")
        self._sorted_asc = np.sort(arr)
        self._sorted_asc.flags.writeable = False

    @property
    def size(self) -> int:
        return int(self._sorted_asc.size)

    @property
    def sorted_desc(self) -> np.ndarray:
        """Samples sorted non-increasing (read-only view)."""
        return self._sorted_asc[::-1]

    @property
    def sorted_asc(self) -> np.ndarray:
        return self._sorted_asc

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:  # pragma: no cover
        return f"EmpiricalDistribution(n={self.size})"


def tail_index(count: int, level) -> int:
    """Exact floor(count * alpha) for the stored binary value of alpha."""
    alpha = as_risk_level(level).alpha
    return math.floor(count * Fraction(alpha))


def value_at_risk(dist: EmpiricalDistribution, level) -> float:
    """Smallest x with empirical P(X > x) <= alpha.

    Equals the (m+1)-th largest sample, m = floor(N * alpha); with ties
    this is still the infimum of the empirical survival function's
    alpha-sublevel set, so P(X > v) <= alpha < P(X >= v) holds exactly.
    """
    m = tail_index(dist.size, level)
    return float(dist.sorted_desc[m])


def conditional_value_at_risk(dist: EmpiricalDistribution, level) -> float:
    """Average of value_at_risk over levels (0, alpha].

    Closed form on the empirical step quantile: with m = floor(N*alpha),

        (1/alpha) * [ (1/N) * sum of m largest + (alpha - m/N) * y_(m+1) ].

    The result is clamped into [y_(m+1), y_(1)], the interval it occupies
    mathematically, so ordering against value_at_risk survives roundoff
    on heavily tied samples.
    """
    alpha = as_risk_level(level).alpha
    y = dist.sorted_desc
    n = dist.size
    m = tail_index(n, alpha)
    if m == 0:
        # integration range sits inside the first step
        return float(y[0])
    head = float(y[:m].sum())
    value = (head / n + (alpha - m / n) * float(y[m])) / alpha
    return float(min(max(value, y[m]), y[0]))


def superquantile_above(dist: EmpiricalDistribution, threshold: float) -> float:
    """Mean of the samples strictly greater than ``threshold``."""
    threshold = float(threshold)
    y_asc = dist.sorted_asc
    start = int(np.searchsorted(y_asc, threshold, side="right"))
    count = dist.size - start
    if count == 0:
        raise EmptyTailError(
            f"no sample strictly exceeds threshold {threshold!r} (max is {y_asc[-1]!r})"
        )
    return float(y_asc[start:].sum() / count)


def buffered_failure_probability(dist: EmpiricalDistribution) -> float:
    """Buffered probability that the value exceeds zero.

    Canonical convex-minimization form: min over a >= 0 of
    mean(max(a*y + 1, 0)), evaluated exactly at a = 0, at every kink
    a = -1/y_i for y_i < 0, and at the a -> inf limit (finite only when
    no sample is strictly positive, where it equals the fraction of
    samples >= 0).  Clamped to [0, 1]; always >= the plain exceedance
    fraction P(X > 0).
    """
    return float(kernels.bpoe_min(dist.sorted_asc))


def buffered_failure_probability_scan(dist: EmpiricalDistribution) -> float:
    """Fast path: level at which the descending-prefix tail mean hits zero.

    Scans prefix means of the non-increasing sample for the first
    strictly negative one and solves the piecewise form of the tail mean
    for its exact zero crossing.  Agrees with the canonical
    minimization within 1/N.
    """
    y = dist.sorted_desc
    n = dist.size
    prefix = np.cumsum(y)
    means = prefix / np.arange(1, n + 1)
    negative = np.flatnonzero(means < 0.0)
    if negative.size == 0:
        return 1.0
    m = int(negative[0])  # number of full steps before the crossing piece
    head = float(prefix[m - 1]) if m > 0 else 0.0
    level = (m * float(y[m]) - head) / (n * float(y[m]))
    return float(min(1.0, max(0.0, level)))
