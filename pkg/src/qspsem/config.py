"""Package-wide defaults.

All comparison tolerances default to 1e-10 absolute and are overridable
per call; the QSPSEM_TOL environment variable overrides the default for
the CLI and for callers that do not pass an explicit tolerance.
"""

import os

DEFAULT_TOL = 1e-10

#: dense matrices only; requests beyond this dimension are rejected
MAX_DIM = 64

#: hard degree cap for adaptive polynomial constructions
MAX_DEGREE = 4000


def default_tol() -> float:
    raw = os.environ.get("QSPSEM_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise ValueError(f"QSPSEM_TOL is not a float: {raw!r}") from exc
    if not (0.0 < tol < 1.0):
        raise ValueError(f"QSPSEM_TOL out of range (0, 1): {tol}")
    return tol
