"""Dense-matrix substrate: validation, rank tests, small SPD solves, seeded RNG.

Matrices are plain float64 numpy arrays in C (row-major) order.  Everything
here is pure: no function mutates its inputs, and outputs are fresh arrays.

The random stream is numpy's PCG64 as wrapped by ``numpy.random.default_rng``;
the generator identity is part of the reproducibility contract, so changing
it is a breaking change.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, RankDeficiencyError

DEFAULT_RANK_TOL = 1e-9

# Relative condition-number ceiling for SPD solves; Gram matrices of valid
# factor points stay far below this.
SPD_COND_LIMIT = 1e14


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a finite float64 2-D C-ordered array."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return m


def numerical_rank(m, tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values above tol times the largest one.

    Returns 0 for the zero matrix.  ``tol`` is relative and must be > 0.
    """
    if tol <= 0:
        raise InvalidInputError(f"tol must be > 0, got {tol}")
    m = as_matrix(m)
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def solve_small_spd(a, b) -> np.ndarray:
    """Solve A X = B for symmetric positive definite A via Cholesky.

    A must be symmetric within 1e-12 relative skew.  Raises
    RankDeficiencyError when A is numerically singular or indefinite.
    """
    a = as_matrix(a, "A")
    b = np.ascontiguousarray(b, dtype=np.float64)
    if not np.all(np.isfinite(b)):
        raise InvalidInputError("B contains non-finite entries")
    n = a.shape[0]
    if a.shape[1] != n:
        raise InvalidInputError(f"A must be square, got shape {a.shape}")
    if b.shape[0] != n:
        raise InvalidInputError(f"B has {b.shape[0]} rows, expected {n}")
    scale = np.abs(a).max()
    if scale > 0 and np.abs(a - a.T).max() > 1e-12 * scale:
        raise InvalidInputError("A is not symmetric")
    w = np.linalg.eigvalsh(a)
    if w[0] <= 0 or w[-1] > SPD_COND_LIMIT * w[0]:
        raise RankDeficiencyError(
            f"SPD solve rejected: eigenvalue range [{w[0]:.3e}, {w[-1]:.3e}]"
        )
    c = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    return scipy.linalg.cho_solve(c, b, check_finite=False)


def spd_factor(a):
    """Cholesky factorization handle for repeated right-hand sides."""
    return scipy.linalg.cho_factor(
        np.ascontiguousarray(a, dtype=np.float64), lower=True, check_finite=False
    )


def spd_solve_factored(factor, b) -> np.ndarray:
    """Solve with a handle from :func:`spd_factor`."""
    return scipy.linalg.cho_solve(factor, b, check_finite=False)


def random_gaussian(rows: int, cols: int, seed) -> np.ndarray:
    """Standard-normal matrix from a PCG64 stream fully determined by seed.

    ``seed`` may be an int or a ``numpy.random.SeedSequence``; identical
    seeds give bit-identical matrices.
    """
    if rows < 1 or cols < 1:
        raise InvalidInputError(f"rows and cols must be >= 1, got {rows}x{cols}")
    rng = np.random.default_rng(seed)
    return rng.standard_normal((rows, cols))
