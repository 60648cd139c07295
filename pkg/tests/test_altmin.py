import numpy as np
import pytest

from indexcoding.altmin import (
    AltMinConfig,
    altmin_objective_trace,
    altmin_solve,
    lp_row_subproblem,
)
from indexcoding.errors import InfeasibleRowError


def _row_objective(V, u):
    return np.abs(V @ u).sum()


def _breakpoint_oracle(V, anchor):
    """Exact minimum of ||V u||_1 on {anchor.u = 1} for r <= 2.

    The feasible set is a point (r=1) or a line (r=2); a piecewise-linear
    convex function attains its minimum at a kink, so enumerating the kinks
    of t -> ||V(u0 + t d)||_1 is exact.  Returns (best objective, sparsest
    optimal ||u||_1 over the optimal kink set).
    """
    K, r = V.shape
    if r == 1:
        u = np.array([1.0 / anchor[0]])
        return _row_objective(V, u), np.abs(u).sum()
    u0 = anchor / (anchor @ anchor)
    d = np.array([-anchor[1], anchor[0]])
    w0, wd = V @ u0, V @ d
    ts = [0.0]
    for k in range(K):
        if abs(wd[k]) > 1e-12:
            ts.append(-w0[k] / wd[k])
    # kinks of ||u0 + t d||_1 matter for the tie-break comparison
    for i in range(2):
        if abs(d[i]) > 1e-12:
            ts.append(-u0[i] / d[i])
    vals = [(np.abs(w0 + t * wd).sum(), t) for t in ts]
    best = min(v for v, _ in vals)
    best_u_l1 = min(
        np.abs(u0 + t * d).sum() for v, t in vals if v <= best + 1e-9 * (1 + best)
    )
    return best, best_u_l1


class TestLpRowSubproblem:
    def test_rank_one_forced_point(self):
        V = np.array([[2.0], [3.0]])
        u = lp_row_subproblem(V, np.array([2.0]))
        assert u[0] == pytest.approx(0.5, abs=1e-10)
        assert _row_objective(V, u) == pytest.approx(2.5, abs=1e-9)

    def test_identity_factor(self):
        K = 4
        V = np.eye(K)
        for i in range(K):
            u = lp_row_subproblem(V, V[i])
            np.testing.assert_allclose(u, V[i], atol=1e-9)
            assert _row_objective(V, u) == pytest.approx(1.0, abs=1e-9)

    def test_tie_break_toward_sparser_u(self):
        V = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        u = lp_row_subproblem(V, np.array([1.0, 0.0]))
        np.testing.assert_allclose(u, [1.0, 0.0], atol=1e-8)
        assert _row_objective(V, u) == pytest.approx(2.0, abs=1e-9)

    def test_zero_anchor_rejected(self):
        with pytest.raises(InfeasibleRowError):
            lp_row_subproblem(np.eye(2), np.zeros(2))

    def test_equality_constraint_residual(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            K = int(rng.integers(2, 7))
            r = int(rng.integers(1, 3))
            V = rng.standard_normal((K, r))
            anchor = V[0]
            if np.abs(anchor).max() < 1e-6:
                continue
            u = lp_row_subproblem(V, anchor)
            assert abs(anchor @ u - 1.0) <= 1e-10

    @pytest.mark.parametrize("seed", range(15))
    def test_optimality_against_breakpoint_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        K = int(rng.integers(2, 8))
        r = int(rng.integers(1, 3))
        V = rng.standard_normal((K, r))
        anchor = np.array(V[0])
        if np.abs(anchor).max() < 1e-8:
            anchor[0] = 1.0
        u = lp_row_subproblem(V, anchor)
        best, best_u_l1 = _breakpoint_oracle(V, anchor)
        got = _row_objective(V, u)
        assert got <= best + 1e-6
        assert got >= best - 1e-6
        # tie-break contract: no optimal vertex has smaller ||u||_1
        assert np.abs(u).sum() <= best_u_l1 + 1e-6


class TestAltminSolve:
    def test_k2_full_rank_reaches_identity(self):
        sol = altmin_solve(2, 2, AltMinConfig(seed=3))
        assert sol.feasible
        assert sol.side_info_amount == 0
        np.testing.assert_allclose(sol.X, np.eye(2), atol=1e-8)

    def test_k2_rank_one_all_nonzero(self):
        sol = altmin_solve(2, 1, AltMinConfig(seed=3))
        assert sol.feasible
        assert sol.side_info_amount == 2

    def test_objective_monotone_across_half_steps(self):
        for seed in (0, 1, 2):
            trace = altmin_objective_trace(4, 2, AltMinConfig(seed=seed))
            for a, b in zip(trace, trace[1:]):
                assert b <= a + 1e-8 * (1.0 + abs(a))

    def test_determinism(self):
        a = altmin_solve(3, 2, AltMinConfig(seed=5))
        b = altmin_solve(3, 2, AltMinConfig(seed=5))
        assert np.array_equal(a.X, b.X)
        assert a.side_info_amount == b.side_info_amount

    def test_diagonal_exact_after_renormalization(self):
        sol = altmin_solve(4, 2, AltMinConfig(seed=7))
        np.testing.assert_allclose(np.diagonal(sol.X), 1.0, atol=1e-12)

    def test_solver_tag(self):
        sol = altmin_solve(2, 1, AltMinConfig(seed=1))
        assert sol.solver == "altmin"
