"""Linear structural design: LP feasibility check and cost minimization.

The structure fails when A V > x componentwise, where x is the vector of
strengths.  Whether the failure region lies strictly beyond a contour
halfplane reduces to a linear program:

    minimize u'V  subject to  A V >= x,  V >= 0

The design passes the contour-inclusion check when that LP is
infeasible (no failure state at all) or its optimal value exceeds the
contour threshold: every failure state then projects beyond it.

``lp_solve`` is a dense two-phase tableau simplex with Bland's
anti-cycling rule throughout.  ``optimize_design`` minimizes the linear
design cost over the feasible set with a two-stage search: bisection
along a ray from the lower bounds (the LP value is componentwise
nondecreasing in x, so feasibility along the ray is monotone), then
cyclic coordinate descent bisecting each strength down toward its lower
bound.  The result is always certified feasible; optimality is checked
against brute-force oracles at small scale rather than claimed in
general.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contour import as_unit_vector
from .errors import ConfigError, NoFeasibleDesignError, NumericError
from .risk import RiskLevel, as_risk_level

__all__ = [
    "LinearProgram",
    "LpOutcome",
    "LinearDesignProblem",
    "DesignConditionResult",
    "SearchControls",
    "lp_solve",
    "condition_check",
    "optimize_design",
]

REDUCED_COST_TOL = 1e-9   # entering-column threshold
PIVOT_TOL = 1e-11         # smallest pivot magnitude considered nonzero
PHASE1_TOL = 1e-8         # residual artificial mass implying infeasibility
FEASIBILITY_TOL = 1e-9    # final solution feasibility check
MAX_ITERATIONS = 50_000


@dataclass(frozen=True)
class LinearProgram:
    """min objective'x  s.t.  constraints x >= rhs, x >= 0."""

    objective: np.ndarray    # (n,)
    constraints: np.ndarray  # (m, n)
    rhs: np.ndarray          # (m,)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.objective, dtype=np.float64))
        a = np.asarray(self.constraints, dtype=np.float64)
        b = np.atleast_1d(np.asarray(self.rhs, dtype=np.float64))
        if a.ndim != 2:
            raise ValueError(f"constraint matrix must be 2-D, got shape {a.shape}")
        m, n = a.shape
        if m < 1 or n < 1:
            raise ValueError(f"need at least one constraint and one variable, got {a.shape}")
        if c.shape != (n,):
            raise ValueError(f"objective must have length {n}, got {c.shape}")
        if b.shape != (m,):
            raise ValueError(f"rhs must have length {m}, got {b.shape}")
        for name, arr in (("objective", c), ("constraints", a), ("rhs", b)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", a)
        object.__setattr__(self, "rhs", b)


@dataclass(frozen=True)
class LpOutcome:
    status: str                    # optimal | infeasible | unbounded
    value: float | None = None
    point: np.ndarray | None = None
    dual: np.ndarray | None = None
    iterations: int = 0


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row, :] /= tab[row, col]
    for r in range(tab.shape[0]):
        if r != row:
            factor = tab[r, col]
            if factor != 0.0:
                tab[r, :] -= factor * tab[row, :]


def _simplex(tab: np.ndarray, basis: list[int], ncols: int, start_iter: int) -> tuple[str, int]:
    """Run Bland-rule pivoting on the tableau until optimal or unbounded."""
    m = tab.shape[0] - 1
    iterations = start_iter
    while True:
        iterations += 1
        if iterations > MAX_ITERATIONS:
            raise NumericError(
                f"simplex exceeded {MAX_ITERATIONS} iterations (basis {basis})"
            )
        if not np.all(np.isfinite(tab)):
            raise NumericError(
                f"simplex tableau lost finiteness at iteration {iterations}"
            )
        # Bland: smallest column index with a significantly negative reduced cost
        enter = -1
        for j in range(ncols):
            if tab[m, j] < -REDUCED_COST_TOL:
                enter = j
                break
        if enter < 0:
            return "optimal", iterations
        # ratio test; exact ties broken by smallest basis index (Bland)
        leave = -1
        best_ratio = math.inf
        for i in range(m):
            coef = tab[i, enter]
            if coef > PIVOT_TOL:
                ratio = tab[i, -1] / coef
                if ratio < best_ratio or (
                    ratio == best_ratio and (leave < 0 or basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return "unbounded", iterations
        _pivot(tab, leave, enter)
        basis[leave] = enter


def lp_solve(lp: LinearProgram) -> LpOutcome:
    """Dense two-phase simplex; exact statuses, value reliable to ~1e-9.

    Raises NumericError on numerical breakdown (non-finite tableau or
    iteration blow-up); returns a dual vector alongside optimal points
    so callers can certify the value by weak duality.
    """
    a = lp.constraints
    b = lp.rhs
    c = lp.objective
    m, n = a.shape

    # equality form [A | -I] z = b, flipping rows so the rhs is nonnegative
    flipped = b < 0
    eq = np.hstack([a, -np.eye(m)])
    eq[flipped] *= -1.0
    rhs = np.where(flipped, -b, b)
    n_struct = n + m  # structural + surplus columns

    # phase 1: artificial basis, minimize artificial mass
    tab = np.zeros((m + 1, n_struct + m + 1))
    tab[:m, :n_struct] = eq
    tab[:m, n_struct : n_struct + m] = np.eye(m)
    tab[:m, -1] = rhs
    tab[m, n_struct : n_struct + m] = 1.0
    for i in range(m):
        tab[m, :] -= tab[i, :]
    basis = [n_struct + i for i in range(m)]

    status, iters = _simplex(tab, basis, n_struct + m, 0)
    if status != "optimal":
        raise NumericError(f"phase 1 terminated {status}; artificial problem is bounded")
    if -tab[m, -1] > PHASE1_TOL:
        return LpOutcome(status="infeasible", iterations=iters)

    # drive leftover artificials out of the basis; drop redundant rows
    keep_rows: list[int] = []
    for i in range(m):
        if basis[i] >= n_struct:
            pivot_col = -1
            for j in range(n_struct):
                if abs(tab[i, j]) > PIVOT_TOL:
                    pivot_col = j
                    break
            if pivot_col < 0:
                continue  # redundant constraint row
            _pivot(tab, i, pivot_col)
            basis[i] = pivot_col
        keep_rows.append(i)
    rows = keep_rows + [m]
    tab = tab[rows][:, list(range(n_struct)) + [tab.shape[1] - 1]]
    basis = [basis[i] for i in keep_rows]
    m_eff = len(basis)

    # phase 2: real objective (zero cost on surplus columns)
    cost = np.zeros(n_struct)
    cost[:n] = c
    tab[m_eff, :] = 0.0
    tab[m_eff, :n_struct] = cost
    for i in range(m_eff):
        cb = cost[basis[i]]
        if cb != 0.0:
            tab[m_eff, :] -= cb * tab[i, :]

    status, iters = _simplex(tab, basis, n_struct, iters)
    if status == "unbounded":
        return LpOutcome(status="unbounded", iterations=iters)

    z = np.zeros(n_struct)
    for i, col in enumerate(basis):
        z[col] = tab[i, -1]
    point = np.maximum(z[:n], 0.0)  # clamp roundoff dust on basic values
    value = float(c @ point)

    residual = a @ point - b
    if np.min(residual) < -FEASIBILITY_TOL or np.min(point) < -FEASIBILITY_TOL:
        raise NumericError(
            f"simplex returned an infeasible point (worst residual "
            f"{float(np.min(residual)):.3e})"
        )

    dual = None
    if m_eff == m:
        try:
            y_eq = np.linalg.solve(eq[:, basis].T, cost[basis])
            dual = np.where(flipped, -y_eq, y_eq)
        except np.linalg.LinAlgError:
            dual = None
    return LpOutcome(status="optimal", value=value, point=point, dual=dual, iterations=iters)


@dataclass(frozen=True)
class LinearDesignProblem:
    """Strength-design instance: loads A, costs c, bounds, and risk data."""

    load_matrix: np.ndarray      # (m, n), nonnegative, no all-zero row
    cost_coefficients: np.ndarray  # (m,), strictly positive
    lower_bounds: np.ndarray | None = None  # (m,), nonnegative; default zeros
    failure_cost: float = 1.0
    level: RiskLevel = field(default_factory=lambda: RiskLevel(0.1))

    def __post_init__(self):
        a = np.asarray(self.load_matrix, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ConfigError(f"A: expected a non-empty 2-D load matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ConfigError("A: entries must be finite")
        if np.any(a < 0):
            raise ConfigError("A: entries must be nonnegative")
        zero_rows = np.flatnonzero(~a.any(axis=1))
        if zero_rows.size:
            raise ConfigError(f"A: row {zero_rows[0]} is all zero")
        m = a.shape[0]
        c = np.atleast_1d(np.asarray(self.cost_coefficients, dtype=np.float64))
        if c.shape != (m,):
            raise ConfigError(f"c: expected length {m}, got shape {c.shape}")
        if not np.all(np.isfinite(c)) or np.any(c <= 0):
            raise ConfigError("c: cost coefficients must be positive and finite")
        if self.lower_bounds is None:
            lb = np.zeros(m)
        else:
            lb = np.atleast_1d(np.asarray(self.lower_bounds, dtype=np.float64))
            if lb.shape != (m,):
                raise ConfigError(f"lower_bounds: expected length {m}, got shape {lb.shape}")
            if not np.all(np.isfinite(lb)) or np.any(lb < 0):
                raise ConfigError("lower_bounds: must be nonnegative and finite")
        k = float(self.failure_cost)
        if not math.isfinite(k) or k <= 0:
            raise ConfigError(f"K: failure cost must be positive and finite, got {k!r}")
        for name, arr in (("load_matrix", a), ("cost_coefficients", c), ("lower_bounds", lb)):
            arr = np.array(arr, dtype=np.float64, order="C")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "failure_cost", k)
        object.__setattr__(self, "level", as_risk_level(self.level))

    @property
    def n_strengths(self) -> int:
        return int(self.load_matrix.shape[0])

    @property
    def n_env(self) -> int:
        return int(self.load_matrix.shape[1])

    def design_cost(self, x) -> float:
        x_arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return float(self.cost_coefficients @ x_arr)

    def to_json(self) -> dict:
        return {
            "A": self.load_matrix.tolist(),
            "c": self.cost_coefficients.tolist(),
            "lower_bounds": self.lower_bounds.tolist(),
            "K": self.failure_cost,
            "alpha": self.level.alpha,
        }

    @classmethod
    def from_json(cls, obj, where: str = "design") -> "LinearDesignProblem":
        if not isinstance(obj, dict):
            raise ConfigError(f"{where}: expected a JSON object")
        unknown = set(obj) - {"A", "c", "lower_bounds", "K", "alpha"}
        if unknown:
            raise ConfigError(f"{where}.{sorted(unknown)[0]}: unknown field")
        for name in ("A", "c", "K", "alpha"):
            if name not in obj:
                raise ConfigError(f"{where}.{name}: required")
        try:
            level = RiskLevel(float(obj["alpha"]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.alpha: {exc}") from None
        return cls(
            load_matrix=obj["A"],
            cost_coefficients=obj["c"],
            lower_bounds=obj.get("lower_bounds"),
            failure_cost=obj["K"],
            level=level,
        )


@dataclass(frozen=True)
class DesignConditionResult:
    """Outcome of the contour-inclusion check with its LP certificate."""

    holds: bool
    lp_status: str
    lp_value: float | None
    certificate: np.ndarray | None  # minimizing environment V0, when the LP is solvable

    def __bool__(self) -> bool:
        return self.holds


def condition_check(
    problem: LinearDesignProblem, x, u, c_u: float, epsilon: float = 0.0
) -> DesignConditionResult:
    """Check whether every failure state projects strictly beyond c_u.

    Solves min u'V subject to A V >= x, V >= 0.  Holds when that LP is
    infeasible (the design cannot fail) or when its optimal value
    exceeds c_u + epsilon; an unbounded LP means failure states reach
    arbitrarily low projections, so the check fails.
    """
    u_arr = as_unit_vector(u)
    if u_arr.size != problem.n_env:
        raise ConfigError(
            f"u: direction has length {u_arr.size}, environment dimension is {problem.n_env}"
        )
    x_arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x_arr.shape != (problem.n_strengths,):
        raise ConfigError(
            f"x: expected length {problem.n_strengths}, got shape {x_arr.shape}"
        )
    if float(epsilon) < 0:
        raise ConfigError(f"epsilon: must be nonnegative, got {epsilon!r}")
    outcome = lp_solve(LinearProgram(u_arr, problem.load_matrix, x_arr))
    if outcome.status == "infeasible":
        return DesignConditionResult(True, outcome.status, None, None)
    if outcome.status == "unbounded":
        return DesignConditionResult(False, outcome.status, None, None)
    holds = outcome.value > float(c_u) + float(epsilon)
    return DesignConditionResult(holds, outcome.status, outcome.value, outcome.point)


@dataclass(frozen=True)
class SearchControls:
    """Knobs for optimize_design; defaults match the documented search."""

    direction: np.ndarray | None = None  # restrict stage 1 to this single ray
    t_max: float = float(2**32)
    rel_tol: float = 1e-6
    cost_tol: float = 1e-8
    max_cycles: int = 60


def optimize_design(
    problem: LinearDesignProblem,
    u,
    c_u: float,
    epsilon: float = 0.0,
    controls: SearchControls | None = None,
) -> tuple[np.ndarray, float]:
    """Minimize the design cost subject to the contour-inclusion check.

    Stage 1 bisects along rays x = lb + t*d for the smallest feasible t
    (relative tolerance ``controls.rel_tol``); raising x only shrinks
    the failure region, so feasibility along a ray is monotone.  By
    default the stage sweeps the all-ones ray plus each coordinate axis
    (a single all-ones ray lands on the constraint surface where
    descent-only polishing cannot move sideways, missing cheap vertex
    designs); ``controls.direction`` restricts it to one custom ray.
    Stage 2 polishes every ray candidate by cyclic coordinate descent,
    bisecting each strength down toward its lower bound while the check
    keeps holding, until a full cycle improves the cost by less than
    ``cost_tol`` relative.  The cheapest polished candidate wins, ties
    broken by ray order.

    Returns (design, cost); the design always passes condition_check.
    Raises NoFeasibleDesignError when no ray reaches a feasible design
    up to t_max.
    """
    controls = controls or SearchControls()
    lb = problem.lower_bounds.copy()
    m = problem.n_strengths
    if controls.direction is None:
        rays = [np.ones(m)]
        if m > 1:
            rays.extend(np.eye(m))
    else:
        direction = np.atleast_1d(np.asarray(controls.direction, dtype=np.float64))
        if direction.shape != (m,):
            raise ConfigError(f"direction: expected length {m}, got shape {direction.shape}")
        if np.any(direction < 0) or not np.any(direction > 0):
            raise ConfigError("direction: must be nonnegative with a positive component")
        rays = [direction]

    def holds(x: np.ndarray) -> bool:
        return condition_check(problem, x, u, c_u, epsilon).holds

    def ray_candidate(direction: np.ndarray) -> np.ndarray | None:
        t_hi = 1.0
        while not holds(lb + t_hi * direction):
            t_hi *= 2.0
            if t_hi > controls.t_max:
                return None
        t_lo = 0.0
        while t_hi - t_lo > controls.rel_tol * t_hi:
            mid = 0.5 * (t_lo + t_hi)
            if holds(lb + mid * direction):
                t_hi = mid
            else:
                t_lo = mid
        return lb + t_hi * direction

    def polish(x: np.ndarray) -> np.ndarray:
        cost = problem.design_cost(x)
        for _ in range(controls.max_cycles):
            for i in range(m):
                if x[i] <= lb[i]:
                    continue
                trial = x.copy()
                trial[i] = lb[i]
                if holds(trial):
                    x = trial
                    continue
                lo, hi = lb[i], x[i]
                while hi - lo > controls.rel_tol * max(abs(hi), 1e-300):
                    mid = 0.5 * (lo + hi)
                    trial[i] = mid
                    if holds(trial):
                        hi = mid
                    else:
                        lo = mid
                x[i] = hi
            new_cost = problem.design_cost(x)
            if cost - new_cost < controls.cost_tol * max(abs(cost), 1e-300):
                break
            cost = new_cost
        return x

    if holds(lb):
        return lb.copy(), problem.design_cost(lb)

    best_x: np.ndarray | None = None
    best_cost = math.inf
    for direction in rays:
        candidate = ray_candidate(direction)
        if candidate is None:
            continue
        candidate = polish(candidate)
        cost = problem.design_cost(candidate)
        if cost < best_cost:
            best_x, best_cost = candidate, cost
    if best_x is None:
        raise NoFeasibleDesignError(
            f"no design on any search ray satisfies the condition up to "
            f"t={controls.t_max:g}"
        )
    return best_x, best_cost
