"""Directional quantile contours from Monte Carlo samples.

For a unit direction u and risk level alpha, the contour threshold is
the empirical value-at-risk of the projected samples u'V; the buffered
threshold is the mean of the projections strictly beyond it.  Evaluated
over a grid of directions these thresholds define supporting halfplanes
whose pairwise intersections (in the plane) assemble the classical and
buffered contour polygons.

Estimates are plug-in: both thresholds use the same sample set.
``validate_exceedance`` measures per-direction exceedance on a holdout
sample and is the intended out-of-sample check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .envdata import check_sample_matrix
from .errors import DimensionError, EmptyTailError, GeometryError
from .risk import (
    EmpiricalDistribution,
    RiskLevel,
    as_risk_level,
    superquantile_above,
    tail_index,
    value_at_risk,
)

__all__ = [
    "UNIT_NORM_TOL",
    "DirectionGrid",
    "ContourTable",
    "ContourBoundary",
    "ExceedanceReport",
    "as_unit_vector",
    "directional_quantile",
    "directional_tail_mean",
    "build_table",
    "boundary",
    "validate_exceedance",
    "write_contour_table",
    "write_contour_boundary",
]

UNIT_NORM_TOL = 1e-12      # |norm(u) - 1| allowed
PARALLEL_TOL = 1e-12       # |sin(angular gap)| below this is degenerate
HALFSPACE_SLACK = 1e-9     # consistency slack for boundary validity flags
RESIDUAL_TOL = 1e-9        # required accuracy of boundary intersections


def as_unit_vector(u) -> np.ndarray:
    """Validate a direction: 1-D, finite, Euclidean norm 1 within 1e-12."""
    arr = np.asarray(u, dtype=np.float64).reshape(-1)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise ValueError(f"direction must be a finite non-empty vector, got {u!r}")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"direction must have unit norm (got norm {norm!r})")
    return arr


@dataclass(frozen=True)
class DirectionGrid:
    """Ordered set of unit directions in R^n."""

    dimension: int
    directions: np.ndarray  # (K, dimension)

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=np.float64)
        if dirs.ndim != 2 or dirs.shape[1] != self.dimension:
            raise ValueError(
                f"directions must have shape (K, {self.dimension}), got {dirs.shape}"
            )
        if dirs.shape[0] < 1:
            raise ValueError("direction grid must contain at least one direction")
        if not np.all(np.isfinite(dirs)):
            raise ValueError("directions must be finite")
        norms = np.linalg.norm(dirs, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
        if bad.size:
            raise ValueError(f"direction {bad[0]} is not unit (norm {norms[bad[0]]!r})")
        dirs = np.array(dirs, dtype=np.float64, order="C")  # own copy; frozen below
        dirs.flags.writeable = False
        object.__setattr__(self, "directions", dirs)

    @classmethod
    def uniform_2d(cls, count: int) -> "DirectionGrid":
        """Planar grid (cos t_j, sin t_j), t_j = 2*pi*j/count."""
        if count < 1:
            raise ValueError(f"direction count must be positive, got {count}")
        theta = 2.0 * np.pi * np.arange(count) / count
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        # renormalize so the unit invariant holds bit-exactly
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return cls(2, dirs)

    @classmethod
    def from_directions(cls, directions) -> "DirectionGrid":
        arr = np.asarray(directions, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"expected a (K, n) direction array, got shape {arr.shape}")
        return cls(int(arr.shape[1]), arr)

    @property
    def count(self) -> int:
        return int(self.directions.shape[0])


@dataclass(frozen=True)
class ContourTable:
    """Per-direction classical and buffered thresholds."""

    level: RiskLevel
    grid: DirectionGrid
    c_values: np.ndarray      # classical threshold per direction
    cbar_values: np.ndarray   # buffered threshold per direction
    sample_count: int

    def __post_init__(self):
        c = np.asarray(self.c_values, dtype=np.float64)
        cbar = np.asarray(self.cbar_values, dtype=np.float64)
        k = self.grid.count
        if c.shape != (k,) or cbar.shape != (k,):
            raise ValueError(
                f"threshold arrays must have shape ({k},), got {c.shape} and {cbar.shape}"
            )
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(cbar))):
            raise ValueError("thresholds must be finite")
        # buffered thresholds are tail means beyond c; allow summation slack
        slack = HALFSPACE_SLACK * np.maximum(1.0, np.abs(c))
        bad = np.flatnonzero(cbar < c - slack)
        if bad.size:
            raise ValueError(
                f"buffered threshold below classical at direction {bad[0]}: "
                f"{cbar[bad[0]]!r} < {c[bad[0]]!r}"
            )
        for name, arr in (("c_values", c), ("cbar_values", cbar)):
            arr = np.array(arr, dtype=np.float64, order="C")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")


@dataclass(frozen=True)
class ContourBoundary:
    """Planar contour polygon: one vertex per adjacent direction pair.

    ``valid[j]`` is False when vertex j pokes outside some supporting
    halfplane by more than the documented slack, i.e. the estimated
    threshold function is locally inconsistent with a convex contour.
    """

    points: np.ndarray  # (K, 2)
    valid: np.ndarray   # (K,) bool


@dataclass(frozen=True)
class ExceedanceReport:
    """Observed per-direction exceedance of the classical thresholds."""

    alpha: float
    counts: np.ndarray        # samples strictly beyond c, per direction
    sample_count: int
    p_hat: np.ndarray
    max_abs_deviation: float

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "sample_count": self.sample_count,
            "p_hat": self.p_hat.tolist(),
            "max_abs_deviation": self.max_abs_deviation,
        }


def _check_dims(samples: np.ndarray, dimension: int, what: str) -> None:
    if samples.shape[1] != dimension:
        raise DimensionError(
            f"{what}: samples have dimension {samples.shape[1]}, expected {dimension}"
        )


def directional_quantile(samples, u, level) -> float:
    """Empirical value-at-risk of the projections u'V."""
    samples = check_sample_matrix(samples)
    u = as_unit_vector(u)
    _check_dims(samples, u.size, "directional_quantile")
    return value_at_risk(EmpiricalDistribution(samples @ u), level)


def directional_tail_mean(samples, u, level) -> float:
    """Mean projection strictly beyond the directional quantile."""
    samples = check_sample_matrix(samples)
    u = as_unit_vector(u)
    _check_dims(samples, u.size, "directional_tail_mean")
    dist = EmpiricalDistribution(samples @ u)
    return superquantile_above(dist, value_at_risk(dist, level))


def build_table(samples, grid: DirectionGrid, level) -> ContourTable:
    """Evaluate classical and buffered thresholds on every grid direction."""
    samples = check_sample_matrix(samples)
    level = as_risk_level(level)
    _check_dims(samples, grid.dimension, "build_table")
    n = samples.shape[0]
    m = tail_index(n, level)
    c, cbar, tail_counts = kernels.directional_quantiles(
        np.ascontiguousarray(samples), grid.directions, m
    )
    empty = np.flatnonzero(tail_counts == 0)
    if empty.size:
        raise EmptyTailError(
            f"direction {empty[0]}: no projection strictly exceeds the quantile "
            f"{c[empty[0]]!r} (degenerate projections)"
        )
    return ContourTable(
        level=level, grid=grid, c_values=c, cbar_values=cbar, sample_count=n
    )


def boundary(table: ContourTable, which: str = "classical") -> ContourBoundary:
    """Intersect adjacent supporting halfplanes into a contour polygon (n = 2)."""
    if which not in ("classical", "buffered"):
        raise ValueError(f"which must be 'classical' or 'buffered', got {which!r}")
    if table.grid.dimension != 2:
        raise DimensionError(
            f"boundary construction requires dimension 2, got {table.grid.dimension}"
        )
    k = table.grid.count
    if k < 3:
        raise GeometryError(f"boundary construction requires at least 3 directions, got {k}")
    levels = table.c_values if which == "classical" else table.cbar_values
    dirs = table.grid.directions

    u_a = dirs
    u_b = np.roll(dirs, -1, axis=0)
    l_a = levels
    l_b = np.roll(levels, -1)
    det = u_a[:, 0] * u_b[:, 1] - u_a[:, 1] * u_b[:, 0]  # sin of angular gap
    degenerate = np.flatnonzero(np.abs(det) < PARALLEL_TOL)
    if degenerate.size:
        j = int(degenerate[0])
        raise GeometryError(
            f"adjacent directions {j} and {(j + 1) % k} are parallel "
            f"(|sin gap| = {abs(det[j]):.3e})"
        )
    points = np.empty((k, 2))
    points[:, 0] = (l_a * u_b[:, 1] - l_b * u_a[:, 1]) / det
    points[:, 1] = (u_a[:, 0] * l_b - u_b[:, 0] * l_a) / det

    residual = np.maximum(
        np.abs(np.sum(points * u_a, axis=1) - l_a),
        np.abs(np.sum(points * u_b, axis=1) - l_b),
    )
    worst = int(np.argmax(residual))
    if residual[worst] > RESIDUAL_TOL:
        raise GeometryError(
            f"intersection at direction {worst} is ill-conditioned "
            f"(residual {residual[worst]:.3e} exceeds {RESIDUAL_TOL})"
        )

    # full consistency check of every vertex against every halfplane
    excess = points @ dirs.T - levels[None, :]
    valid = ~(excess > HALFSPACE_SLACK).any(axis=1)
    return ContourBoundary(points=points, valid=valid)


def validate_exceedance(table: ContourTable, holdout) -> ExceedanceReport:
    """Fraction of holdout samples strictly beyond each classical threshold."""
    holdout = check_sample_matrix(holdout)
    _check_dims(holdout, table.grid.dimension, "validate_exceedance")
    counts = kernels.exceedance_counts(
        np.ascontiguousarray(holdout), table.grid.directions, table.c_values
    )
    m = holdout.shape[0]
    p_hat = counts / m
    alpha = table.level.alpha
    return ExceedanceReport(
        alpha=alpha,
        counts=counts,
        sample_count=m,
        p_hat=p_hat,
        max_abs_deviation=float(np.max(np.abs(p_hat - alpha))),
    )


def write_contour_table(table: ContourTable, path) -> None:
    """CSV export: 'theta,ux,uy,c,cbar' in the plane, 'u1..un,c,cbar' otherwise.

    Angles are in radians, normalized to [0, 2*pi).
    """
    dirs = table.grid.directions
    n = table.grid.dimension
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if n == 2:
            fh.write("theta,ux,uy,c,cbar\n")
            theta = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2.0 * np.pi)
            for j in range(table.grid.count):
                fh.write(
                    f"{theta[j]:.17g},{dirs[j, 0]:.17g},{dirs[j, 1]:.17g},"
                    f"{table.c_values[j]:.17g},{table.cbar_values[j]:.17g}\n"
                )
        else:
            fh.write(",".join(f"u{i + 1}" for i in range(n)) + ",c,cbar\n")
            for j in range(table.grid.count):
                cells = [f"{dirs[j, i]:.17g}" for i in range(n)]
                cells += [f"{table.c_values[j]:.17g}", f"{table.cbar_values[j]:.17g}"]
                fh.write(",".join(cells) + "\n")


def write_contour_boundary(bnd: ContourBoundary, path) -> None:
    """CSV export: 'x,y,valid' with valid as 1/0."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("x,y,valid\n")
        for (x, y), ok in zip(bnd.points, bnd.valid):
            fh.write(f"{x:.17g},{y:.17g},{1 if ok else 0}\n")
