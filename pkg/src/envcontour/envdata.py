"""Environmental sample generation and CSV ingestion.

Sampling is fully deterministic given (config, count): uniforms come
from numpy's PCG64 generator (O'Neill's permuted congruential generator,
64-bit output; uniforms are the documented 53-bit conversion
``(next_uint64 >> 11) * 2**-53``) and every marginal is produced by its
inverse CDF, with the standard normal inverse computed by the in-code
AS 241 rational approximation.  Dependence, when requested, is a
Gaussian copula: standard normals from the uniforms, correlated through
a lower-triangular factor of the correlation matrix, mapped back to
uniforms through the normal CDF and then through each marginal's
inverse CDF.

CSV format: comma separated, one observation per row, '.' decimal
separator, '\\n' newlines, optional single header row of non-numeric
labels.  Values are written with 17 significant digits so a write/read
round trip reproduces the matrix exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._normal import norm_cdf, norm_ppf
from .errors import ConfigError, FactorizationError, SampleParseError

__all__ = [
    "Marginal",
    "EnvModelConfig",
    "sample",
    "read_samples",
    "write_samples",
    "check_sample_matrix",
]

# canonical parameter names per marginal kind, in storage order
_MARGINAL_FIELDS = {
    "normal": ("mu", "sigma"),
    "lognormal": ("mu", "sigma"),  # sigma is the std dev of log(X)
    "weibull": ("shape", "scale"),
    "uniform": ("a", "b"),
    "exponential": ("rate",),
}

# smallest/largest open-interval uniforms; keeps every inverse CDF finite
_U_LO = 2.0**-53
_U_HI = 1.0 - 2.0**-53


@dataclass(frozen=True)
class Marginal:
    """One marginal distribution, identified by kind and parameter tuple."""

    kind: str
    params: tuple[float, ...]

    @classmethod
    def normal(cls, mu: float, sigma: float) -> "Marginal":
        return cls("normal", (float(mu), float(sigma)))

    @classmethod
    def lognormal(cls, mu: float, sigma: float) -> "Marginal":
        return cls("lognormal", (float(mu), float(sigma)))

    @classmethod
    def weibull(cls, shape: float, scale: float) -> "Marginal":
        return cls("weibull", (float(shape), float(scale)))

    @classmethod
    def uniform(cls, a: float, b: float) -> "Marginal":
        return cls("uniform", (float(a), float(b)))

    @classmethod
    def exponential(cls, rate: float) -> "Marginal":
        return cls("exponential", (float(rate),))

    def validate(self, where: str = "marginal") -> None:
        if self.kind not in _MARGINAL_FIELDS:
            raise ConfigError(
                f"{where}.kind: unknown marginal kind {self.kind!r}; "
                f"expected one of {sorted(_MARGINAL_FIELDS)}"
            )
        names = _MARGINAL_FIELDS[self.kind]
        if len(self.params) != len(names):
            raise ConfigError(
                f"{where}: {self.kind} takes parameters {names}, got {len(self.params)} values"
            )
        values = dict(zip(names, self.params))
        for name, value in values.items():
            if not math.isfinite(value):
                raise ConfigError(f"{where}.{name}: must be finite, got {value!r}")
        if self.kind in ("normal", "lognormal") and values["sigma"] <= 0:
            raise ConfigError(f"{where}.sigma: must be > 0, got {values['sigma']!r}")
        if self.kind == "weibull":
            if values["shape"] <= 0:
                raise ConfigError(f"{where}.shape: must be > 0, got {values['shape']!r}")
            if values["scale"] <= 0:
                raise ConfigError(f"{where}.scale: must be > 0, got {values['scale']!r}")
        if self.kind == "uniform" and not values["a"] < values["b"]:
            raise ConfigError(
                f"{where}.a: must satisfy a < b, got a={values['a']!r}, b={values['b']!r}"
            )
        if self.kind == "exponential" and values["rate"] <= 0:
            raise ConfigError(f"{where}.rate: must be > 0, got {values['rate']!r}")

    def inverse_cdf(self, u: np.ndarray) -> np.ndarray:
        """Quantile function evaluated on uniforms in the open unit interval."""
        if self.kind == "normal":
            mu, sigma = self.params
            return mu + sigma * norm_ppf(u)
        if self.kind == "lognormal":
            mu, sigma = self.params
            return np.exp(mu + sigma * norm_ppf(u))
        if self.kind == "weibull":
            shape, scale = self.params
            return scale * (-np.log1p(-u)) ** (1.0 / shape)
        if self.kind == "uniform":
            a, b = self.params
            return a + (b - a) * u
        if self.kind == "exponential":
            (rate,) = self.params
            return -np.log1p(-u) / rate
        raise ConfigError(f"unknown marginal kind {self.kind!r}")

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        out.update(zip(_MARGINAL_FIELDS.get(self.kind, ()), self.params))
        return out

    @classmethod
    def from_json(cls, obj, where: str = "marginal") -> "Marginal":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ConfigError(f"{where}: expected an object with a 'kind' field")
        kind = obj["kind"]
        if kind not in _MARGINAL_FIELDS:
            raise ConfigError(
                f"{where}.kind: unknown marginal kind {kind!r}; "
                f"expected one of {sorted(_MARGINAL_FIELDS)}"
            )
        params = []
        for name in _MARGINAL_FIELDS[kind]:
            if name not in obj:
                raise ConfigError(f"{where}.{name}: required for kind {kind!r}")
            try:
                params.append(float(obj[name]))
            except (TypeError, ValueError):
                raise ConfigError(f"{where}.{name}: must be a number, got {obj[name]!r}") from None
        extras = set(obj) - {"kind"} - set(_MARGINAL_FIELDS[kind])
        if extras:
            raise ConfigError(f"{where}.{sorted(extras)[0]}: unexpected field for kind {kind!r}")
        marg = cls(kind, tuple(params))
        marg.validate(where)
        return marg


@dataclass(frozen=True)
class EnvModelConfig:
    """Parametric environment model: marginals, optional Gaussian-copula
    correlation, and the generator seed."""

    marginals: tuple[Marginal, ...]
    correlation: np.ndarray | None = None
    seed: int = 0

    def __post_init__(self):
        marginals = tuple(self.marginals)
        object.__setattr__(self, "marginals", marginals)
        if len(marginals) == 0:
            raise ConfigError("marginals: at least one marginal is required")
        for i, marg in enumerate(marginals):
            if not isinstance(marg, Marginal):
                raise ConfigError(f"marginals[{i}]: expected a Marginal, got {type(marg).__name__}")
            marg.validate(f"marginals[{i}]")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError(f"seed: must be an integer, got {self.seed!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed: must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.correlation is not None:
            n = len(marginals)
            corr = np.array(self.correlation, dtype=np.float64)  # own copy; frozen below
            if corr.shape != (n, n):
                raise ConfigError(
                    f"correlation: expected shape ({n}, {n}) to match marginals, got {corr.shape}"
                )
            if not np.all(np.isfinite(corr)):
                raise ConfigError("correlation: entries must be finite")
            if not np.allclose(corr, corr.T, rtol=0.0, atol=1e-12):
                raise ConfigError("correlation: matrix must be symmetric")
            if not np.allclose(np.diag(corr), 1.0, rtol=0.0, atol=1e-12):
                raise ConfigError("correlation: diagonal entries must all be 1")
            corr.flags.writeable = False
            object.__setattr__(self, "correlation", corr)

    @property
    def dimension(self) -> int:
        return len(self.marginals)

    def to_json(self) -> dict:
        return {
            "marginals": [m.to_json() for m in self.marginals],
            "correlation": None if self.correlation is None else self.correlation.tolist(),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj, where: str = "model") -> "EnvModelConfig":
        if not isinstance(obj, dict):
            raise ConfigError(f"{where}: expected a JSON object")
        unknown = set(obj) - {"marginals", "correlation", "seed"}
        if unknown:
            raise ConfigError(f"{where}.{sorted(unknown)[0]}: unknown field")
        if "marginals" not in obj or not isinstance(obj["marginals"], list):
            raise ConfigError(f"{where}.marginals: required list of marginal objects")
        marginals = tuple(
            Marginal.from_json(m, f"{where}.marginals[{i}]")
            for i, m in enumerate(obj["marginals"])
        )
        correlation = obj.get("correlation")
        seed = obj.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError(f"{where}.seed: must be an integer, got {seed!r}")
        return cls(marginals=marginals, correlation=correlation, seed=seed)


def _cholesky_lower(matrix: np.ndarray) -> np.ndarray:
    """Lower-triangular factor L with L L' = matrix; fails if not positive definite."""
    n = matrix.shape[0]
    lower = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            acc = matrix[i, j] - lower[i, :j] @ lower[j, :j]
            if i == j:
                if acc <= 0.0:
                    raise FactorizationError(
                        f"correlation matrix is not positive definite "
                        f"(pivot {acc:.6g} at row {i})"
                    )
                lower[i, i] = math.sqrt(acc)
            else:
                lower[i, j] = acc / lower[j, j]
    return lower


def _clip_open(u: np.ndarray) -> np.ndarray:
    return np.clip(u, _U_LO, _U_HI)


def sample(config: EnvModelConfig, count: int) -> np.ndarray:
    """Draw ``count`` observations from the configured environment model.

    Parameters
    ----------
    config : EnvModelConfig
        Validated model; its seed fixes the output exactly.
    count : int
        Number of observations (rows), at least 1.

    Returns
    -------
    (count, n) float64 array, marginal i in column i.  All entries are
    finite; uniforms are clipped to the open unit interval before any
    inverse CDF is applied.
    """
    if not isinstance(config, EnvModelConfig):
        raise ConfigError(f"config: expected EnvModelConfig, got {type(config).__name__}")
    if not isinstance(count, (int, np.integer)) or isinstance(count, bool) or count < 1:
        raise ConfigError(f"count: must be a positive integer, got {count!r}")
    n = config.dimension
    rng = np.random.Generator(np.random.PCG64(config.seed))
    u = rng.random((int(count), n))
    if config.correlation is not None:
        lower = _cholesky_lower(config.correlation)
        z = norm_ppf(_clip_open(u))
        u = norm_cdf(z @ lower.T)
    u = _clip_open(u)
    columns = [marg.inverse_cdf(u[:, i]) for i, marg in enumerate(config.marginals)]
    return np.column_stack(columns)


def check_sample_matrix(values) -> np.ndarray:
    """Validate and coerce a sample matrix to (N, n) float64."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"sample matrix must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"sample matrix must be at least 1x1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample matrix entries must be finite (no NaN or infinity)")
    return arr


def read_samples(path) -> np.ndarray:
    """Parse a sample CSV; see the module docstring for the format.

    Raises SampleParseError with 1-based row/column location on ragged
    rows, non-numeric or non-finite cells after the header, and empty
    files.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    while lines and lines[-1].strip() in ("", "\r"):
        lines.pop()
    if not lines:
        raise SampleParseError("empty file: no sample rows found", row=1)

    rows: list[list[float]] = []
    ncol: int | None = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r")
        if line.strip() == "":
            raise SampleParseError(f"blank line at row {lineno}", row=lineno)
        cells = line.split(",")
        values: list[float] = []
        bad: tuple[int, str] | None = None
        for colno, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError:
                bad = (colno, cell)
                break
            if not math.isfinite(value):
                bad = (colno, cell)
                break
            values.append(value)
        if bad is not None:
            if lineno == 1 and not rows:
                continue  # single non-numeric header row
            raise SampleParseError(
                f"non-numeric cell {bad[1]!r} at row {lineno}, column {bad[0]}",
                row=lineno,
                column=bad[0],
            )
        if ncol is None:
            ncol = len(values)
        elif len(values) != ncol:
            raise SampleParseError(
                f"ragged row: expected {ncol} columns, got {len(values)} at row {lineno}",
                row=lineno,
            )
        rows.append(values)
    if not rows:
        raise SampleParseError("no data rows after header", row=1)
    return np.asarray(rows, dtype=np.float64)


def write_samples(matrix, path) -> None:
    """Write a sample matrix as CSV with 17 significant digits per value."""
    arr = check_sample_matrix(matrix)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in arr:
            fh.write(",".join(f"{v:.17g}" for v in row))
            fh.write("\n")
