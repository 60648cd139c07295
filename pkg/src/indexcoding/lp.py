"""Dense revised simplex for the small LPs of the l1 baseline.

Standard form: minimize c.z subject to A z = b, z >= 0, with A at most a few
hundred entries per side.  The implementation is built for the heavily
degenerate geometry of those LPs (most right-hand sides are exactly zero):

* every iteration re-solves against the original data through a fresh LU
  factorization of the basis, so round-off never accumulates across pivots;
* entering column: Dantzig's rule (most negative reduced cost);
* leaving row: lexicographic ratio test on [x_B | B^{-1}], which makes the
  objective strictly lex-decrease and therefore cannot cycle even under
  degeneracy.

All choices are deterministic.  Zero-slope rays (possible when a data matrix
loses column rank) carry only rounding-level negative reduced costs and are
treated as optimal-face directions: the column is banned rather than the
problem declared unbounded.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import IndexCodingError, NumericalFailureError


class LPInfeasibleError(IndexCodingError):
    """The LP constraints admit no nonnegative solution."""


RED_TOL = 1e-9  # reduced-cost threshold for entering
PIVOT_TOL = 1e-9  # smallest usable pivot element
RATIO_TIE_TOL = 1e-9
FEAS_TOL = 1e-7
RAY_TOL = 1e-6
MAX_PIVOTS = 20000


def solve_standard_lp(c, A, b):
    """Solve min c.z s.t. A z = b, z >= 0.  Returns (z, objective value).

    Raises LPInfeasibleError when no feasible point exists and
    NumericalFailureError on pivot-count blowup or unbounded descent.
    """
    A = np.array(A, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("inconsistent LP dimensions")

    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    A_full = np.hstack([A, np.eye(m)])
    basis = list(range(n, n + m))

    # phase 1: minimize the artificial sum
    cost1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis, obj1 = _iterate(A_full, b, cost1, basis, allowed=n + m)
    scale = 1.0 + (abs(b).max() if m else 0.0)
    if obj1 > FEAS_TOL * scale:
        raise LPInfeasibleError(f"phase-1 optimum {obj1:.3e} > 0")
    A_full, b, basis = _drive_out_artificials(A_full, b, basis, n)

    # phase 2: original costs; artificial columns are never entered
    cost2 = np.concatenate([c, np.zeros(A_full.shape[1] - n)])
    basis, _ = _iterate(A_full, b, cost2, basis, allowed=n)

    xB = _solve_basis(A_full, basis, b)
    z = np.zeros(n)
    for bi, v in zip(basis, xB):
        if bi < n:
            z[bi] = max(float(v), 0.0)
    return z, float(c @ z)


def _factor_basis(A_full, basis):
    B = A_full[:, basis]
    with warnings.catch_warnings():
        # singularity is detected explicitly below
        warnings.simplefilter("ignore")
        lu = scipy.linalg.lu_factor(B, check_finite=False)
    if not np.all(np.isfinite(lu[0])) or np.abs(np.diagonal(lu[0])).min() < 1e-300:
        raise NumericalFailureError("singular simplex basis")
    return lu


def _solve_basis(A_full, basis, rhs, trans=0):
    lu = _factor_basis(A_full, basis)
    return scipy.linalg.lu_solve(lu, rhs, trans=trans, check_finite=False)


def _iterate(A_full, b, cost, basis, allowed: int):
    """Dantzig entering + lexicographic leaving; returns (basis, objective)."""
    m = A_full.shape[0]
    eye = np.eye(m)
    banned: set = set()

    for _ in range(MAX_PIVOTS):
        lu = _factor_basis(A_full, basis)
        xB = scipy.linalg.lu_solve(lu, b, check_finite=False)
        cB = cost[basis]
        obj = float(cB @ xB)
        y = scipy.linalg.lu_solve(lu, cB, trans=1, check_finite=False)
        red = cost - y @ A_full
        red[basis] = 0.0

        in_basis = set(basis)
        enter = -1
        best = -RED_TOL
        for j in range(allowed):
            if red[j] < best and j not in in_basis and j not in banned:
                best = red[j]
                enter = j
        if enter < 0:
            return basis, obj

        d = scipy.linalg.lu_solve(lu, A_full[:, enter], check_finite=False)
        pos = d > PIVOT_TOL
        if not np.any(pos):
            if red[enter] >= -RAY_TOL:
                banned.add(enter)
                continue
            raise NumericalFailureError("LP is unbounded below")

        with np.errstate(all="ignore"):
            ratios = np.where(pos, np.maximum(xB, 0.0) / np.where(pos, d, 1.0), np.inf)
        best_ratio = float(ratios[pos].min())
        tie = np.flatnonzero(pos & (ratios <= best_ratio + RATIO_TIE_TOL))
        # pivot-quality filter: within the (mostly degenerate, zero-step) tie
        # set, never pivot on an element orders of magnitude below the best
        # available one; tiny pivots there are rounding debris and poison the
        # basis without moving the iterate
        d_tie_max = float(d[tie].max())
        strong = tie[d[tie] >= max(PIVOT_TOL, 1e-2 * d_tie_max)]
        if strong.size:
            tie = strong
        if len(tie) == 1:
            leave = int(tie[0])
        else:
            # lexicographic tie-break on rows of B^{-1} scaled by the pivot
            Binv = scipy.linalg.lu_solve(lu, eye, check_finite=False)
            leave = int(tie[0])
            best_row = Binv[leave] / d[leave]
            for i in tie[1:]:
                row = Binv[int(i)] / d[int(i)]
                if _lex_less(row, best_row):
                    leave = int(i)
                    best_row = row
        basis[leave] = enter

    raise NumericalFailureError("simplex pivot limit exceeded")


def _lex_less(a, b, tol=1e-11) -> bool:
    for x, y in zip(a, b):
        if x < y - tol:
            return True
        if x > y + tol:
            return False
    return False


def _drive_out_artificials(A_full, b, basis, n: int):
    """Swap structural columns into basis slots held by artificials.

    Rows whose artificial cannot be replaced are redundant and are dropped.
    """
    while True:
        art_rows = [i for i, bi in enumerate(basis) if bi >= n]
        if not art_rows:
            return A_full, b, basis
        m = A_full.shape[0]
        lu = _factor_basis(A_full, basis)
        W = scipy.linalg.lu_solve(lu, A_full[:, :n], check_finite=False)
        i = art_rows[0]
        in_basis = set(basis)
        enter = -1
        best = PIVOT_TOL
        for j in range(n):
            # largest replacement pivot; debris-sized ones poison the basis
            if j not in in_basis and abs(W[i, j]) > best:
                best = abs(W[i, j])
                enter = j
        if enter >= 0:
            basis[i] = enter
        else:
            keep = [k for k in range(m) if k != i]
            A_full = A_full[keep, :]
            b = b[keep]
            basis = [basis[k] for k in keep]
