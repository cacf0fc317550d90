"""Exception types shared across the package."""


class EnvContourError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EnvContourError):
    """Invalid configuration; the message names the offending field."""


class FactorizationError(EnvContourError):
    """Correlation matrix is not positive definite (Cholesky failed)."""


class SampleParseError(EnvContourError):
    """Malformed sample CSV; carries 1-based row/column location."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class DimensionError(EnvContourError):
    """Operands have incompatible dimensions."""


class EmptyTailError(EnvContourError):
    """No sample strictly exceeds the requested threshold."""


class GeometryError(EnvContourError):
    """Degenerate geometry (parallel directions, grid too small)."""


class NumericError(EnvContourError):
    """Numerical breakdown inside a solver; message carries diagnostics."""


class ModelViolationError(EnvContourError):
    """Cost model assumptions violated (design cost not below failure cost)."""


class ClassificationError(EnvContourError):
    """A candidate was supplied under the wrong case label."""


class NoFeasibleDesignError(EnvContourError):
    """No design satisfies the contour-inclusion condition within the search range."""
