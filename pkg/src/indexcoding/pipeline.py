"""Two-stage solver and rank sweep for the sparse-plus-low-rank program.

Stage 1 minimizes the smoothed sparsity surrogate at fixed rank to find a
sparsity pattern; stage 2 refines it by solving the pattern's rank-constrained
completion problem, warm-started from the stage-1 factors.  Each rank is
attempted from several seeded restarts and the sparsest feasible result wins.

Seeding contract: restart j at rank r for solver tag t draws its Gaussian
initialization from numpy PCG64 seeded with
SeedSequence(entropy=master_seed, spawn_key=(t, r, j)); tag 0 is the
Riemannian pipeline, tag 1 the alternating-minimization baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import ic_model, linalg
from .errors import (
    InvalidInputError,
    NumericalFailureError,
    PipelineError,
    RankDeficiencyError,
)
from .manifold import FactorPoint
from .objectives import (
    RefinementObjective,
    RegularizedObjective,
    SparsityPattern,
    extract_pattern,
)
from .trust_region import TrustRegionConfig, tr_solve

SOLVER_RIEMANNIAN = "riemannian"
SOLVER_ALTMIN = "altmin"
_SOLVER_TAG = {SOLVER_RIEMANNIAN: 0, SOLVER_ALTMIN: 1}

# Stage-2 completion residuals must sit far below the feasibility tolerance,
# otherwise leakage at pattern zeros dominates the decode error of the
# resulting code; the gradient of the completion objective is driven to this
# level instead of the looser stage-1 tolerance.
REFINE_GRAD_TOL = 1e-11


@dataclass
class PipelineConfig:
    rho: float = 0.001
    eps: float = 0.01
    restarts: int = 10
    seed: int = 0
    tr_config: TrustRegionConfig = field(default_factory=TrustRegionConfig)
    feasibility_tol: float = 1e-6

    def __post_init__(self):
        if self.restarts < 1:
            raise InvalidInputError("restarts must be >= 1")
        if self.eps <= 0 or self.feasibility_tol <= 0:
            raise InvalidInputError("tolerances must be positive")
        if self.rho < 0:
            raise InvalidInputError("rho must be >= 0")


@dataclass
class IndexCodingSolution:
    X: np.ndarray
    factors: FactorPoint
    pattern: SparsityPattern
    rank: int
    side_info_amount: int
    feasible: bool
    solver: str
    alignment_residual: float = float("nan")

    def side_information(self) -> ic_model.SideInformation:
        return ic_model.pattern_to_side_info(self.pattern)


@dataclass(frozen=True)
class TradeoffEntry:
    rank: int
    side_info_amount: int
    feasible: bool
    solver: str


@dataclass
class TradeoffCurve:
    entries: tuple
    solutions: tuple = ()

    def series(self, solver: str) -> list:
        return sorted(
            (e for e in self.entries if e.solver == solver), key=lambda e: e.rank
        )

    def envelope(self, solver: str = SOLVER_RIEMANNIAN) -> list:
        """Running minimum of feasible sparsity values up to each rank."""
        env = []
        best: Optional[int] = None
        for e in self.series(solver):
            if e.feasible and (best is None or e.side_info_amount < best):
                best = e.side_info_amount
            env.append(best)
        return env


def seeded_rng(master_seed: int, solver: str, rank: int, restart: int):
    ss = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=(_SOLVER_TAG[solver], rank, restart)
    )
    return np.random.default_rng(ss)


def init_factors(K: int, r: int, rng) -> FactorPoint:
    """Gaussian factors scaled by 1/sqrt(r) so X = U V^T has unit-order entries.

    A rank-deficient draw (measure zero, but contractual) is perturbed once
    with 1e-8-scaled noise before giving up.
    """
    U = rng.standard_normal((K, r)) / np.sqrt(r)
    V = rng.standard_normal((K, r)) / np.sqrt(r)
    try:
        return FactorPoint(U, V)
    except RankDeficiencyError:
        U = U + 1e-8 * rng.standard_normal((K, r))
        V = V + 1e-8 * rng.standard_normal((K, r))
        return FactorPoint(U, V)


def renormalize_diagonal(x: FactorPoint, tol: float) -> FactorPoint:
    """Scale rows of U so the represented X has exact unit diagonal.

    Requires every |X_ii| >= tol; row scaling by nonzero factors preserves
    both the zero pattern and the rank of X.
    """
    X = x.product()
    d = np.diagonal(X)
    if np.any(np.abs(d) < tol):
        raise InvalidInputError("diagonal entry below tolerance; cannot renormalize")
    return FactorPoint(np.array(x.U) / d[:, None], np.array(x.V))


def find_pattern(K: int, r: int, cfg: PipelineConfig, seed, trace_fn=None) -> tuple:
    """Stage 1: solve the smoothed sparsity problem, threshold the solution.

    ``seed`` is anything numpy's default_rng accepts.  Returns the converged
    factors and the extracted pattern.  Numerical failure raises; the caller
    moves on to the next restart seed.
    """
    if not (1 <= r <= K):
        raise InvalidInputError(f"rank must satisfy 1 <= r <= K, got r={r}, K={K}")
    rng = np.random.default_rng(seed)
    x0 = init_factors(K, r, rng)
    obj = RegularizedObjective(K, cfg.rho, cfg.eps)
    res = tr_solve(obj, x0, cfg.tr_config, trace_fn=trace_fn)
    if res.status == "numerical-failure":
        raise NumericalFailureError("stage-1 solve hit non-finite values")
    pattern = extract_pattern(res.point.product(), cfg.eps)
    return res.point, pattern


def refine(
    pattern: SparsityPattern,
    r: int,
    warm_start: FactorPoint,
    cfg: PipelineConfig,
    trace_fn=None,
) -> IndexCodingSolution:
    """Stage 2: rank-constrained completion of the pattern, then diagonal repair.

    The completion is solved to a much tighter gradient tolerance than stage 1
    (REFINE_GRAD_TOL) so that pattern-zero residuals of feasible solutions sit
    at decoding-grade accuracy.  If any diagonal entry is below the
    feasibility tolerance the solution is returned unrenormalized and flagged
    infeasible.
    """
    if warm_start.K != pattern.K or warm_start.r != r:
        raise InvalidInputError("warm start inconsistent with pattern or rank")
    obj = RefinementObjective(pattern)
    tr_cfg = replace(
        cfg.tr_config,
        grad_norm_tol=min(cfg.tr_config.grad_norm_tol, REFINE_GRAD_TOL),
    )
    res = tr_solve(obj, warm_start, tr_cfg, trace_fn=trace_fn)
    point = res.point
    s = ic_model.side_info_amount(pattern)

    d = np.abs(np.diagonal(point.product()))
    if np.any(d < cfg.feasibility_tol):
        report = ic_model.verify_alignment(point.product(), pattern, cfg.feasibility_tol)
        return IndexCodingSolution(
            X=np.array(point.product()),
            factors=point,
            pattern=pattern,
            rank=r,
            side_info_amount=s,
            feasible=False,
            solver=SOLVER_RIEMANNIAN,
            alignment_residual=report.max_residual,
        )

    try:
        point = renormalize_diagonal(point, cfg.feasibility_tol)
    except (InvalidInputError, RankDeficiencyError):
        report = ic_model.verify_alignment(point.product(), pattern, cfg.feasibility_tol)
        return IndexCodingSolution(
            X=np.array(point.product()),
            factors=point,
            pattern=pattern,
            rank=r,
            side_info_amount=s,
            feasible=False,
            solver=SOLVER_RIEMANNIAN,
            alignment_residual=report.max_residual,
        )

    X = np.array(point.product())
    report = ic_model.verify_alignment(X, pattern, cfg.feasibility_tol)
    feasible = report.passed and linalg.numerical_rank(X) <= r
    return IndexCodingSolution(
        X=X,
        factors=point,
        pattern=pattern,
        rank=r,
        side_info_amount=s,
        feasible=feasible,
        solver=SOLVER_RIEMANNIAN,
        alignment_residual=report.max_residual,
    )


def solve_one(K: int, r: int, cfg: PipelineConfig, trace_fn=None) -> IndexCodingSolution:
    """Best feasible solution at rank r across cfg.restarts seeded restarts.

    Feasible candidates are ranked by (side_info_amount, restart index); when
    nothing is feasible the candidate closest to alignment (smallest residual)
    is returned as a best-effort answer.
    """
    if not (1 <= r <= K):
        raise InvalidInputError(f"rank must satisfy 1 <= r <= K, got r={r}, K={K}")
    candidates = []
    failures = []
    for j in range(cfg.restarts):
        rng = seeded_rng(cfg.seed, SOLVER_RIEMANNIAN, r, j)
        try:
            warm, pattern = find_pattern(K, r, cfg, rng, trace_fn=trace_fn)
            sol = refine(pattern, r, warm, cfg, trace_fn=trace_fn)
        except (NumericalFailureError, RankDeficiencyError) as exc:
            failures.append(exc)
            continue
        candidates.append((sol, j))
    if not candidates:
        raise PipelineError(
            f"all {cfg.restarts} restarts failed at rank {r}: {failures[-1]}"
        )
    feasible = [(sol, j) for sol, j in candidates if sol.feasible]
    if feasible:
        sol, _ = min(feasible, key=lambda t: (t[0].side_info_amount, t[1]))
        return sol
    sol, _ = min(candidates, key=lambda t: (t[0].alignment_residual, t[1]))
    return sol


def sweep(K: int, cfg: PipelineConfig) -> TradeoffCurve:
    """solve_one at every rank 1..K, assembled in rank order."""
    if K < 1:
        raise InvalidInputError(f"K must be >= 1, got {K}")
    solutions = []
    entries = []
    for r in range(1, K + 1):
        sol = solve_one(K, r, cfg)
        solutions.append(sol)
        entries.append(
            TradeoffEntry(
                rank=r,
                side_info_amount=sol.side_info_amount,
                feasible=sol.feasible,
                solver=SOLVER_RIEMANNIAN,
            )
        )
    return TradeoffCurve(entries=tuple(entries), solutions=tuple(solutions))
