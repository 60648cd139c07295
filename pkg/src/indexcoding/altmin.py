"""Alternating-minimization l1 baseline over the factorization X = U V^T.

The entrywise l1 norm decomposes over rows of either factor:
||U V^T||_1 = sum_i ||V u_i||_1 with the unit-diagonal constraint touching
only row u_i, and symmetrically sum_j ||U v_j||_1 for the rows of V.  Each
half-step therefore splits into K independent small linear programs solved
exactly; the objective can never increase across a half-step.

Degenerate LP ties are broken toward minimum ||u||_1 (a second LP restricted
to the optimal face) and then toward the lexicographically smallest simplex
basis, because reported sparsity counts depend on which optimal vertex is
picked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ic_model, linalg
from .errors import (
    InfeasibleRowError,
    InvalidInputError,
    NumericalFailureError,
    RankDeficiencyError,
)
from .lp import LPInfeasibleError, solve_standard_lp
from .manifold import FactorPoint
from .objectives import extract_pattern
from .pipeline import (
    SOLVER_ALTMIN,
    IndexCodingSolution,
    TradeoffCurve,
    TradeoffEntry,
    init_factors,
    renormalize_diagonal,
    seeded_rng,
)

# Optimal-face slack for the tie-break LP, relative to the stage-1 optimum.
# Pattern-zero residuals of the final factors inherit this scale, and decode
# accuracy of the resulting codes requires them far below 1e-8.
TIE_BREAK_SLACK = 1e-13


@dataclass
class AltMinConfig:
    max_outer: int = 50
    zero_tol: float = 1e-6
    seed: int = 0
    stall_tol: float = 1e-8
    max_retries: int = 10

    def __post_init__(self):
        if self.max_outer < 1:
            raise InvalidInputError("max_outer must be >= 1")
        if self.zero_tol <= 0 or self.stall_tol <= 0:
            raise InvalidInputError("tolerances must be positive")


def lp_row_subproblem(V, anchor) -> np.ndarray:
    """Minimize ||V u||_1 subject to anchor . u = 1, solved exactly.

    V is K-by-r with full column rank; anchor is the constraint row (the
    matching row of V in the alternating scheme) and must be nonzero.
    """
    V = linalg.as_matrix(V, "V")
    anchor = np.asarray(anchor, dtype=np.float64).reshape(-1)
    K, r = V.shape
    if anchor.shape != (r,):
        raise InvalidInputError(f"anchor length {anchor.shape[0]} != rank {r}")
    if not np.any(anchor != 0.0):
        raise InfeasibleRowError("anchor row is zero; constraint 0 = 1 infeasible")

    # variables z = [p (r), q (r), t (K), s1 (K), s2 (K)]; u = p - q
    #   V(p-q) - t + s1 = 0
    #  -V(p-q) - t + s2 = 0
    #   anchor.(p-q)    = 1
    n = 2 * r + 3 * K
    A = np.zeros((2 * K + 1, n))
    b = np.zeros(2 * K + 1)
    A[:K, :r] = V
    A[:K, r : 2 * r] = -V
    A[:K, 2 * r : 2 * r + K] = -np.eye(K)
    A[:K, 2 * r + K : 2 * r + 2 * K] = np.eye(K)
    A[K : 2 * K, :r] = -V
    A[K : 2 * K, r : 2 * r] = V
    A[K : 2 * K, 2 * r : 2 * r + K] = -np.eye(K)
    A[K : 2 * K, 2 * r + 2 * K :] = np.eye(K)
    A[2 * K, :r] = anchor
    A[2 * K, r : 2 * r] = -anchor
    b[2 * K] = 1.0

    c = np.zeros(n)
    c[2 * r : 2 * r + K] = 1.0
    try:
        z, f_opt = solve_standard_lp(c, A, b)
    except LPInfeasibleError as exc:
        raise InfeasibleRowError(str(exc)) from exc

    # tie-break: minimize ||u||_1 = sum(p + q) over the optimal face
    A2 = np.zeros((2 * K + 2, n + 1))
    A2[: 2 * K + 1, :n] = A
    A2[2 * K + 1, 2 * r : 2 * r + K] = 1.0
    A2[2 * K + 1, n] = 1.0  # slack for the face inequality
    b2 = np.concatenate([b, [f_opt + TIE_BREAK_SLACK * (1.0 + abs(f_opt))]])
    c2 = np.zeros(n + 1)
    c2[: 2 * r] = 1.0
    try:
        z2, _ = solve_standard_lp(c2, A2, b2)
        z = z2[:n]
    except (LPInfeasibleError, NumericalFailureError):
        pass  # keep the stage-1 vertex

    return z[:r] - z[r : 2 * r]


def _l1_objective(U, V) -> float:
    return float(np.abs(U @ V.T).sum())


def altmin_solve(K: int, r: int, cfg: AltMinConfig) -> IndexCodingSolution:
    """Alternate exact row-LP half-steps until the l1 objective stalls.

    Returns a solution tagged "altmin" with the same thresholding,
    renormalization and feasibility accounting as the Riemannian pipeline.
    A failed row LP restarts from a fresh seed up to cfg.max_retries times.
    """
    if not (1 <= r <= K):
        raise InvalidInputError(f"rank must satisfy 1 <= r <= K, got r={r}, K={K}")
    last_exc: Exception | None = None
    for attempt in range(cfg.max_retries + 1):
        rng = seeded_rng(cfg.seed, SOLVER_ALTMIN, r, attempt)
        x0 = init_factors(K, r, rng)
        try:
            return _altmin_run(K, r, np.array(x0.U), np.array(x0.V), cfg)
        except (InfeasibleRowError, NumericalFailureError, RankDeficiencyError) as exc:
            last_exc = exc
    raise NumericalFailureError(f"alternating minimization failed: {last_exc}")


def altmin_objective_trace(K: int, r: int, cfg: AltMinConfig) -> list:
    """Objective value after every half-step (for the monotonicity contract)."""
    rng = seeded_rng(cfg.seed, SOLVER_ALTMIN, r, 0)
    x0 = init_factors(K, r, rng)
    trace: list = []
    _altmin_run(K, r, np.array(x0.U), np.array(x0.V), cfg, trace=trace)
    return trace


def _altmin_run(K, r, U, V, cfg: AltMinConfig, trace=None) -> IndexCodingSolution:
    prev = _l1_objective(U, V)
    for _ in range(cfg.max_outer):
        for i in range(K):
            U[i, :] = lp_row_subproblem(V, V[i, :])
        if trace is not None:
            trace.append(_l1_objective(U, V))
        for j in range(K):
            V[j, :] = lp_row_subproblem(U, U[j, :])
        cur = _l1_objective(U, V)
        if trace is not None:
            trace.append(cur)
        if abs(prev - cur) < cfg.stall_tol * (1.0 + abs(prev)):
            break
        prev = cur

    point = FactorPoint(U, V)
    feasible_so_far = True
    try:
        point = renormalize_diagonal(point, cfg.zero_tol)
    except InvalidInputError:
        feasible_so_far = False  # diagonal collapsed; report as-is
    X = np.array(point.product())
    pattern = extract_pattern(X, cfg.zero_tol)
    report = ic_model.verify_alignment(X, pattern, cfg.zero_tol)
    feasible = feasible_so_far and report.passed and linalg.numerical_rank(X) <= r
    return IndexCodingSolution(
        X=X,
        factors=point,
        pattern=pattern,
        rank=r,
        side_info_amount=ic_model.side_info_amount(pattern),
        feasible=feasible,
        solver=SOLVER_ALTMIN,
        alignment_residual=report.max_residual,
    )


def altmin_sweep(K: int, cfg: AltMinConfig) -> TradeoffCurve:
    """One altmin solve per rank 1..K."""
    if K < 1:
        raise InvalidInputError(f"K must be >= 1, got {K}")
    solutions = []
    entries = []
    for r in range(1, K + 1):
        sol = altmin_solve(K, r, cfg)
        solutions.append(sol)
        entries.append(
            TradeoffEntry(
                rank=r,
                side_info_amount=sol.side_info_amount,
                feasible=sol.feasible,
                solver=SOLVER_ALTMIN,
            )
        )
    return TradeoffCurve(entries=tuple(entries), solutions=tuple(solutions))
