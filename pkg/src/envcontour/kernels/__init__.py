"""Hot-kernel dispatch.

Two interchangeable backends live here: ``_numba`` (JIT-compiled, the
default when numba imports cleanly) and ``_numpy`` (pure numpy).  Set
``ENVCONTOUR_BACKEND=numpy`` or ``ENVCONTOUR_BACKEND=numba`` before
import to force one; ``benchmarks/bench_backends.py`` compares them.

Within one backend results are bit-reproducible run to run.  Across
backends the quantile outputs match exactly (order statistics) while
tail means agree only to summation roundoff.
"""

from __future__ import annotations

import os
import warnings

from . import _numpy

__all__ = [
    "BACKEND",
    "directional_quantiles",
    "exceedance_counts",
    "bpoe_min",
]


def _select_backend() -> str:
    requested = os.environ.get("ENVCONTOUR_BACKEND", "").strip().lower()
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        from . import _numba  # noqa: F401  -- raise loudly if explicitly requested
        return "numba"
    if requested:
        warnings.warn(
            f"ENVCONTOUR_BACKEND={requested!r} not recognized; "
            "expected 'numba' or 'numpy', falling back to auto-detection",
            stacklevel=2,
        )
    try:
        from . import _numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


BACKEND = _select_backend()

if BACKEND == "numba":
    from ._numba import bpoe_min, directional_quantiles, exceedance_counts
else:
    from ._numpy import bpoe_min, directional_quantiles, exceedance_counts
