"""Risk of total cost for a design, and contour-based sufficiency checks.

A design either functions or fails in a given environment; failure adds
a fixed cost K on top of the design cost.  The total cost therefore has
a two-point distribution, and both its value-at-risk and conditional
value-at-risk reduce to closed forms in the failure probability p_f:

* value-at-risk: K + kappa when p_f > alpha, else kappa;
* conditional value-at-risk: (K / alpha) * min(p_f, alpha) + kappa.

``case1`` labels p_f > alpha, ``case2`` the complement (p_f = alpha
counts as case2: the quantile convention uses the weak inequality).

The sufficiency checks connect designs to contour thresholds: a design
functioning everywhere on the halfplane u'V <= c has failure
probability bounded by the halfplane's exceedance; a performance
function dominated pointwise by u'V - cbar is bounded by the buffered
threshold's exceedance, which is itself at most the classical one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .contour import as_unit_vector
from .envdata import check_sample_matrix
from .errors import ClassificationError, DimensionError, ModelViolationError
from .risk import RiskLevel, as_risk_level

__all__ = [
    "PerformanceFunction",
    "CostModel",
    "RiskOfCostReport",
    "ConditionResult",
    "SufficiencyResult",
    "SignConstraints",
    "linear_performance",
    "halfspace_performance",
    "constant_performance",
    "failure_probability",
    "var_of_total_cost",
    "cvar_of_total_cost",
    "risk_of_cost_report",
    "halfspace_condition",
    "domination_condition",
    "sufficient_cvar_condition",
    "choose_u_signs",
    "compare_concepts",
]

# evaluator g(V, x): (N, n) environments, design vector -> (N,) responses;
# strictly positive means failed, <= 0 means functioning
PerformanceFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def linear_performance(matrix) -> PerformanceFunction:
    """Failure when A V exceeds the design componentwise in every row.

    g(V, x) = min_i((A V)_i - x_i): positive exactly when all load
    components strictly exceed their strengths.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"load matrix must be 2-D, got shape {a.shape}")

    def g(values: np.ndarray, x: np.ndarray) -> np.ndarray:
        x_arr = np.asarray(x, dtype=np.float64).reshape(-1)
        if x_arr.size != a.shape[0]:
            raise DimensionError(
                f"design has length {x_arr.size}, load matrix has {a.shape[0]} rows"
            )
        return (values @ a.T - x_arr[None, :]).min(axis=1)

    return g


def halfspace_performance(u, threshold: float) -> PerformanceFunction:
    """g(V, x) = u'V - threshold (design-independent)."""
    u_arr = as_unit_vector(u)
    thr = float(threshold)

    def g(values: np.ndarray, x: np.ndarray) -> np.ndarray:
        return values @ u_arr - thr

    return g


def constant_performance(value: float) -> PerformanceFunction:
    """g identically equal to ``value``."""
    val = float(value)

    def g(values: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.full(values.shape[0], val)

    return g


@dataclass(frozen=True)
class CostModel:
    """Failure cost, design-cost function, and the shared risk level."""

    failure_cost: float
    design_cost: Callable[[np.ndarray], float]
    level: RiskLevel

    def __post_init__(self):
        object.__setattr__(self, "level", as_risk_level(self.level))
        k = float(self.failure_cost)
        if not np.isfinite(k) or k <= 0:
            raise ValueError(f"failure cost must be positive and finite, got {k!r}")
        object.__setattr__(self, "failure_cost", k)

    def kappa(self, x) -> float:
        """Design cost, checked against the failure-cost assumption."""
        value = float(self.design_cost(x))
        if not np.isfinite(value) or value <= 0:
            raise ModelViolationError(f"design cost must be positive and finite, got {value!r}")
        if value >= self.failure_cost:
            raise ModelViolationError(
                f"design cost {value!r} must stay below the failure cost "
                f"{self.failure_cost!r}"
            )
        return value


@dataclass(frozen=True)
class RiskOfCostReport:
    p_f: float
    var_cost: float
    cvar_cost: float
    case_label: str  # "case1" (p_f > alpha) or "case2"

    def to_json(self) -> dict:
        return {
            "p_f": self.p_f,
            "var_cost": self.var_cost,
            "cvar_cost": self.cvar_cost,
            "case": self.case_label,
        }


def failure_probability(g: PerformanceFunction, x, samples) -> float:
    """Fraction of samples where the design fails (g strictly positive)."""
    values = check_sample_matrix(samples)
    responses = np.asarray(g(values, np.asarray(x, dtype=np.float64)))
    if responses.shape != (values.shape[0],):
        raise DimensionError(
            f"performance function returned shape {responses.shape}, "
            f"expected ({values.shape[0]},)"
        )
    return float(np.count_nonzero(responses > 0.0) / values.shape[0])


def _check_pf(p_f: float) -> float:
    p_f = float(p_f)
    if not 0.0 <= p_f <= 1.0:
        raise ValueError(f"failure probability must lie in [0, 1], got {p_f!r}")
    return p_f


def var_of_total_cost(p_f: float, model: CostModel, x) -> tuple[float, str]:
    """Value-at-risk of total cost and its case label."""
    p_f = _check_pf(p_f)
    kappa = model.kappa(x)
    if p_f > model.level.alpha:
        return model.failure_cost + kappa, "case1"
    return kappa, "case2"


def cvar_of_total_cost(p_f: float, model: CostModel, x) -> tuple[float, str]:
    """Conditional value-at-risk of total cost and its case label."""
    p_f = _check_pf(p_f)
    kappa = model.kappa(x)
    alpha = model.level.alpha
    if p_f > alpha:
        return model.failure_cost + kappa, "case1"
    return model.failure_cost * (p_f / alpha) + kappa, "case2"


def risk_of_cost_report(g: PerformanceFunction, x, samples, model: CostModel) -> RiskOfCostReport:
    """Evaluate a design end to end: failure fraction plus both cost risks."""
    p_f = failure_probability(g, x, samples)
    var_cost, case = var_of_total_cost(p_f, model, x)
    cvar_cost, _ = cvar_of_total_cost(p_f, model, x)
    return RiskOfCostReport(p_f=p_f, var_cost=var_cost, cvar_cost=cvar_cost, case_label=case)


@dataclass(frozen=True)
class ConditionResult:
    """Outcome of a sufficiency check, with the first witness on violation."""

    holds: bool
    witness_index: int | None
    witness_environment: np.ndarray | None
    witness_value: float | None
    failure_count: int
    threshold_exceed_count: int
    sample_count: int

    def __bool__(self) -> bool:
        return self.holds


def halfspace_condition(g: PerformanceFunction, x, u, c_u: float, samples) -> ConditionResult:
    """Does the design function everywhere on the halfplane u'V <= c_u?

    When it holds, every failing sample projects strictly beyond c_u, so
    the in-sample failure fraction is bounded by the halfplane's
    exceedance fraction (reported in the result for callers to compare
    against their risk level).
    """
    values = check_sample_matrix(samples)
    u_arr = as_unit_vector(u)
    _require_same_dim(values, u_arr)
    x_arr = np.asarray(x, dtype=np.float64)
    responses = np.asarray(g(values, x_arr))
    proj = values @ u_arr
    inside = proj <= float(c_u)
    failing = responses > 0.0
    violations = np.flatnonzero(inside & failing)
    failure_count = int(np.count_nonzero(failing))
    exceed_count = int(np.count_nonzero(proj > float(c_u)))
    if violations.size:
        j = int(violations[0])
        return ConditionResult(
            holds=False,
            witness_index=j,
            witness_environment=values[j].copy(),
            witness_value=float(responses[j]),
            failure_count=failure_count,
            threshold_exceed_count=exceed_count,
            sample_count=values.shape[0],
        )
    # failures all lie strictly beyond the halfplane
    assert failure_count <= exceed_count
    return ConditionResult(
        holds=True,
        witness_index=None,
        witness_environment=None,
        witness_value=None,
        failure_count=failure_count,
        threshold_exceed_count=exceed_count,
        sample_count=values.shape[0],
    )


def domination_condition(g: PerformanceFunction, x, u, cbar_u: float, samples) -> ConditionResult:
    """Is g(V, x) dominated by u'V - cbar_u at every sample?

    On hold, failures imply projections strictly beyond the buffered
    threshold, so the failure fraction is bounded by that (smaller)
    exceedance fraction.
    """
    values = check_sample_matrix(samples)
    u_arr = as_unit_vector(u)
    _require_same_dim(values, u_arr)
    x_arr = np.asarray(x, dtype=np.float64)
    responses = np.asarray(g(values, x_arr))
    margin = values @ u_arr - float(cbar_u)
    violations = np.flatnonzero(responses > margin)
    failure_count = int(np.count_nonzero(responses > 0.0))
    exceed_count = int(np.count_nonzero(margin > 0.0))
    if violations.size:
        j = int(violations[0])
        return ConditionResult(
            holds=False,
            witness_index=j,
            witness_environment=values[j].copy(),
            witness_value=float(responses[j]),
            failure_count=failure_count,
            threshold_exceed_count=exceed_count,
            sample_count=values.shape[0],
        )
    assert failure_count <= exceed_count
    return ConditionResult(
        holds=True,
        witness_index=None,
        witness_environment=None,
        witness_value=None,
        failure_count=failure_count,
        threshold_exceed_count=exceed_count,
        sample_count=values.shape[0],
    )


def _require_same_dim(values: np.ndarray, u: np.ndarray) -> None:
    if values.shape[1] != u.size:
        raise DimensionError(
            f"samples have dimension {values.shape[1]}, direction has {u.size}"
        )


@dataclass(frozen=True)
class SufficiencyResult:
    guaranteed: bool
    violating_pair: tuple[int, int] | None  # (index into case2 list, index into case1 list)
    margin: float | None  # most negative slack when violated

    def __bool__(self) -> bool:
        return self.guaranteed


def sufficient_cvar_condition(
    model: CostModel,
    candidates_case2: Sequence[tuple],
    candidates_case1: Sequence[tuple],
) -> SufficiencyResult:
    """Cost-gap test guaranteeing the optimum satisfies p_f <= alpha.

    Guaranteed iff kappa(x2) - kappa(x1) <= (K/alpha) * (alpha - p_f(x2))
    for every pair of a case2 candidate (design, p_f, kappa) and a case1
    candidate (design, kappa).  Vacuously guaranteed when either list is
    empty.
    """
    alpha = model.level.alpha
    k_over_alpha = model.failure_cost / alpha
    for i, entry in enumerate(candidates_case2):
        _, p_f, _ = entry
        if not 0.0 <= p_f <= alpha:
            raise ClassificationError(
                f"candidates_case2[{i}]: p_f={p_f!r} is not in [0, alpha={alpha!r}]"
            )
    worst: tuple[float, int, int] | None = None
    for i, (_, p_f2, kappa2) in enumerate(candidates_case2):
        allowance = k_over_alpha * (alpha - p_f2)
        for j, (_, kappa1) in enumerate(candidates_case1):
            slack = allowance - (kappa2 - kappa1)
            if slack < 0 and (worst is None or slack < worst[0]):
                worst = (slack, i, j)
    if worst is None:
        return SufficiencyResult(guaranteed=True, violating_pair=None, margin=None)
    return SufficiencyResult(
        guaranteed=False, violating_pair=(worst[1], worst[2]), margin=worst[0]
    )


_SIGN_BY_MONOTONICITY = {"nondecreasing": 1, "nonincreasing": -1, "unknown": 0}


@dataclass(frozen=True)
class SignConstraints:
    """Per-component admissible sign of the search direction.

    +1 restricts u_i to (0, 1), -1 to (-1, 0), 0 leaves it free.
    """

    signs: tuple[int, ...]

    def bounds(self) -> tuple[tuple[float, float], ...]:
        out = []
        for s in self.signs:
            if s > 0:
                out.append((0.0, 1.0))
            elif s < 0:
                out.append((-1.0, 0.0))
            else:
                out.append((-1.0, 1.0))
        return tuple(out)

    def admits(self, u) -> bool:
        u_arr = np.asarray(u, dtype=np.float64).reshape(-1)
        if u_arr.size != len(self.signs):
            raise DimensionError(
                f"direction has length {u_arr.size}, constraints have {len(self.signs)}"
            )
        for s, component in zip(self.signs, u_arr):
            if s > 0 and not component > 0:
                return False
            if s < 0 and not component < 0:
                return False
        return True

    def admissible_arc_2d(self) -> tuple[float, float]:
        """Open angular interval (lo, hi) of admissible planar directions.

        For the fully unconstrained case returns (0, 2*pi), to be read as
        the whole circle.
        """
        if len(self.signs) != 2:
            raise DimensionError("angular arcs are defined for dimension 2 only")
        s1, s2 = self.signs
        if (s1, s2) == (0, 0):
            return (0.0, 2.0 * np.pi)
        half = np.pi / 2.0
        # intersect the halfcircles allowed by each constrained component
        if s1 != 0 and s2 != 0:
            base = {
                (1, 1): 0.0,
                (-1, 1): half,
                (-1, -1): np.pi,
                (1, -1): -half,
            }[(s1, s2)]
            return (base, base + half)
        if s1 != 0:
            return (-half, half) if s1 > 0 else (half, 3 * half)
        return (0.0, np.pi) if s2 > 0 else (-np.pi, 0.0)

    def sweep_2d(self, count: int) -> np.ndarray:
        """``count`` unit directions spread over the open admissible arc."""
        if count < 1:
            raise ValueError(f"sweep count must be positive, got {count}")
        lo, hi = self.admissible_arc_2d()
        if (lo, hi) == (0.0, 2.0 * np.pi):
            theta = lo + (hi - lo) * np.arange(count) / count
        else:
            theta = lo + (hi - lo) * (np.arange(count) + 0.5) / count
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return dirs


def choose_u_signs(monotonicity: Sequence[str]) -> SignConstraints:
    """Sign constraints that follow the performance function's monotonicity.

    Nondecreasing response in an environmental component forces a
    positive search-direction component there; nonincreasing forces a
    negative one; unknown leaves it unconstrained.
    """
    signs = []
    for i, label in enumerate(monotonicity):
        if label not in _SIGN_BY_MONOTONICITY:
            raise ValueError(
                f"monotonicity[{i}]: expected one of {sorted(_SIGN_BY_MONOTONICITY)}, "
                f"got {label!r}"
            )
        signs.append(_SIGN_BY_MONOTONICITY[label])
    if not signs:
        raise ValueError("monotonicity list must be non-empty")
    return SignConstraints(signs=tuple(signs))


def compare_concepts(reports: Sequence) -> int:
    """Index of the smallest risk-of-cost value; ties go to the lowest index.

    Entries may be plain values or (direction, design, value) records;
    for sequence entries the last element is taken as the value.
    """
    items = list(reports)
    if not items:
        raise ValueError("compare_concepts requires at least one candidate")
    values = [
        float(item[-1]) if isinstance(item, (tuple, list)) else float(item)
        for item in items
    ]
    best = 0
    for i, value in enumerate(values[1:], start=1):
        if value < values[best]:
            best = i
    return best
