"""Worked examples for the empirical risk measures."""

import numpy as np
import pytest

from envcontour.errors import EmptyTailError
from envcontour.risk import (
    EmpiricalDistribution,
    RiskLevel,
    buffered_failure_probability,
    buffered_failure_probability_scan,
    conditional_value_at_risk,
    superquantile_above,
    tail_index,
    value_at_risk,
)

ONE_TO_TEN = EmpiricalDistribution(np.arange(1.0, 11.0))


class TestRiskLevel:
    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5, float("nan"), float("inf")])
    def test_rejects_out_of_range(self, alpha):
        with pytest.raises(ValueError):
            RiskLevel(alpha)

    def test_accepts_interior(self):
        assert RiskLevel(0.5).alpha == 0.5


class TestEmpiricalDistribution:
    def test_sorts_descending(self):
        dist = EmpiricalDistribution([3.0, 1.0, 2.0])
        assert dist.sorted_desc.tolist() == [3.0, 2.0, 1.0]

    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(ValueError):
            EmpiricalDistribution([])
        with pytest.raises(ValueError):
            EmpiricalDistribution([1.0, float("nan")])
        with pytest.raises(ValueError):
            EmpiricalDistribution([float("inf")])

    def test_view_is_read_only(self):
        dist = EmpiricalDistribution([1.0, 2.0])
        with pytest.raises(ValueError):
            dist.sorted_desc[0] = 5.0


class TestTailIndex:
    def test_matches_exact_rational_floor(self):
        # floor(10 * float(0.3)) must be 2: the stored 0.3 is below 3/10
        assert tail_index(10, 0.3) == 2
        assert tail_index(10, 0.2) == 2
        assert tail_index(100, 0.29) == 28
        assert tail_index(3, 0.5) == 1


class TestValueAtRisk:
    def test_one_to_ten(self):
        # m = 2, third largest
        assert value_at_risk(ONE_TO_TEN, 0.2) == 8.0

    def test_constant_samples(self):
        dist = EmpiricalDistribution([4.5] * 7)
        for alpha in (0.01, 0.2, 0.5, 0.99):
            assert value_at_risk(dist, alpha) == 4.5

    def test_affine_instance(self):
        mapped = EmpiricalDistribution(2.0 * np.arange(1.0, 11.0) + 1.0)
        assert value_at_risk(mapped, 0.2) == 17.0


class TestConditionalValueAtRisk:
    def test_one_to_ten_fifth(self):
        assert conditional_value_at_risk(ONE_TO_TEN, 0.2) == pytest.approx(9.5, abs=1e-12)

    def test_one_to_ten_quarter(self):
        # m = 2: (1.9 + 0.05 * 8) / 0.25
        assert conditional_value_at_risk(ONE_TO_TEN, 0.25) == pytest.approx(9.2, abs=1e-12)

    def test_constant_samples(self):
        dist = EmpiricalDistribution([3.0] * 5)
        assert conditional_value_at_risk(dist, 0.4) == 3.0

    def test_tiny_alpha_returns_max(self):
        assert conditional_value_at_risk(ONE_TO_TEN, 0.05) == 10.0


class TestSuperquantileAbove:
    def test_one_to_ten_above_eight(self):
        assert superquantile_above(ONE_TO_TEN, 8.0) == 9.5

    def test_single_element_tail(self):
        assert superquantile_above(EmpiricalDistribution([5.0]), 0.0) == 5.0

    def test_strict_exceedance_raises(self):
        with pytest.raises(EmptyTailError):
            superquantile_above(EmpiricalDistribution([1.0, 2.0]), 2.0)


class TestBufferedFailureProbability:
    def test_all_negative_is_zero(self):
        assert buffered_failure_probability(EmpiricalDistribution([-3.0, -2.0, -1.0])) == 0.0

    def test_positive_mean_forces_one(self):
        assert buffered_failure_probability(EmpiricalDistribution([-1.0, 0.0, 1.0, 4.0])) == 1.0

    def test_uniform_tail(self):
        rng = np.random.default_rng(7)
        dist = EmpiricalDistribution(rng.uniform(-3.0, 1.0, 10**6))
        assert buffered_failure_probability(dist) == pytest.approx(0.5, abs=0.01)

    def test_scan_examples(self):
        assert buffered_failure_probability_scan(EmpiricalDistribution([-3.0, -2.0, -1.0])) == 0.0
        assert buffered_failure_probability_scan(EmpiricalDistribution([-1.0, 0.0, 1.0, 4.0])) == 1.0
        # plateau of zeros: level where the tail mean first turns negative
        plateau = EmpiricalDistribution([0.0, 0.0, -1.0])
        assert buffered_failure_probability_scan(plateau) == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert buffered_failure_probability(plateau) == pytest.approx(2.0 / 3.0, abs=1e-15)

    def test_dominates_plain_exceedance(self, rng):
        for _ in range(50):
            x = rng.standard_normal(rng.integers(1, 200)) - rng.uniform(0, 2)
            dist = EmpiricalDistribution(x)
            p_f = float(np.mean(x > 0))
            assert buffered_failure_probability(dist) >= p_f - 1e-12

    def test_breakpoint_minimum_against_dense_grid(self, rng):
        # independent oracle: evaluate the convex objective on a dense grid
        # of multipliers; the breakpoint minimum must match the grid minimum
        # and lower-bound the objective everywhere
        for _ in range(25):
            x = rng.standard_normal(rng.integers(2, 60)) - rng.uniform(0, 1.5)
            dist = EmpiricalDistribution(x)
            result = buffered_failure_probability(dist)
            breakpoints = -1.0 / x[x < 0] if np.any(x < 0) else np.array([1.0])
            grid = np.unique(np.concatenate([
                [0.0], breakpoints,
                np.geomspace(max(breakpoints.min() * 1e-3, 1e-9),
                             breakpoints.max() * 1e3, 400),
            ]))
            objective = np.mean(np.maximum(grid[:, None] * x[None, :] + 1.0, 0.0), axis=1)
            clipped = np.clip(objective, 0.0, 1.0)
            assert result <= clipped.min() + 1e-12
            assert np.isclose(result, clipped.min(), rtol=1e-9, atol=1e-12) or (
                # minimum attained only in the a -> inf limit
                x.max() <= 0
            )


class TestCvarIntegrationOracle:
    """Independent check: the closed form equals a Riemann sum of the
    empirical step quantile over (0, alpha]."""

    def test_riemann_sum_converges_to_closed_form(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 40))
            x = rng.standard_normal(n) * rng.uniform(0.5, 2.0)
            alpha = float(rng.uniform(0.05, 0.95))
            dist = EmpiricalDistribution(x)
            y = dist.sorted_desc
            steps = 20000
            u = (np.arange(steps) + 0.5) * (alpha / steps)
            quantile_path = y[np.minimum((n * u).astype(np.int64), n - 1)]
            riemann = float(quantile_path.mean())
            spread = float(y[0] - y[-1])
            tol = spread * n * (alpha / steps) / alpha + 1e-12
            assert abs(conditional_value_at_risk(dist, alpha) - riemann) <= tol
