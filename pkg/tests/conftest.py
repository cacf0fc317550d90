import math
from fractions import Fraction

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def survival_counts(values, v):
    """(#{x > v}, #{x >= v}) by direct counting."""
    arr = np.asarray(values, dtype=np.float64)
    return int(np.count_nonzero(arr > v)), int(np.count_nonzero(arr >= v))


def frac_le(count: int, n: int, alpha: float) -> bool:
    """count/n <= alpha, decided in exact rational arithmetic."""
    return Fraction(count, n) <= Fraction(alpha)


def frac_lt(alpha: float, count: int, n: int) -> bool:
    """alpha < count/n, decided in exact rational arithmetic."""
    return Fraction(alpha) < Fraction(count, n)


def exact_tail_index(n: int, alpha: float) -> int:
    return math.floor(n * Fraction(alpha))


def mixed_sample_sets(rng, n_sets, max_size=500):
    """Random sample sets from a mix of continuous shapes."""
    out = []
    for _ in range(n_sets):
        n = int(rng.integers(1, max_size + 1))
        kind = rng.integers(0, 4)
        if kind == 0:
            x = rng.standard_normal(n) * rng.uniform(0.5, 3) + rng.uniform(-5, 5)
        elif kind == 1:
            x = rng.uniform(-5, 5, n)
        elif kind == 2:
            x = rng.exponential(rng.uniform(0.2, 2.0), n) - rng.uniform(0, 3)
        else:
            x = rng.standard_t(4, n)
        out.append(x)
    return out
