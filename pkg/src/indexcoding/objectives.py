"""Smooth cost functions over the factorization X = U V^T.

Two objectives drive the two-stage pipeline:

* RegularizedObjective: 0.5 * sum_i (X_ii - 1)^2 + rho * sum_ij sqrt(X_ij^2 + eps^2),
  a smoothed-l1 sparsity surrogate with a quadratic unit-diagonal penalty.
  The sum runs over all K^2 entries including the diagonal.
* RefinementObjective: 0.5 * sum_i (X_ii - 1)^2 + 0.5 * ||(P .* X) - X||_F^2,
  a matrix-completion least squares against a fixed sparsity pattern P.
  Since (P .* X) - X = -(1-P) .* X and P has unit diagonal, the two terms
  never touch the same entry.

Each objective exposes value, Euclidean partials with respect to (U, V), and
the Euclidean directional derivative of those partials, which is what the
trust-region solver needs for Hessian actions.  Both are invariant under
(U, V) -> (U M^{-1}, V M^T) because they depend on the factors only through X.
"""

from __future__ import annotations

import numpy as np

from . import kernels, linalg
from .errors import InvalidInputError
from .manifold import FactorPoint, TangentVector


class SparsityPattern:
    """Binary K-by-K matrix with unit diagonal marking allowed nonzeros."""

    __slots__ = ("P",)

    def __init__(self, P):
        P = linalg.as_matrix(P, "P")
        if P.shape[0] != P.shape[1]:
            raise InvalidInputError(f"pattern must be square, got {P.shape}")
        if not np.all((P == 0.0) | (P == 1.0)):
            raise InvalidInputError("pattern entries must be 0 or 1")
        if not np.all(np.diagonal(P) == 1.0):
            raise InvalidInputError("pattern diagonal must be all ones")
        self.P = P

    @property
    def K(self) -> int:
        return self.P.shape[0]

    def nnz(self) -> int:
        return int(self.P.sum())

    def zero_mask(self) -> np.ndarray:
        """Complement 1 - P (the positions the refinement term penalizes)."""
        return 1.0 - self.P

    def __eq__(self, other) -> bool:
        return isinstance(other, SparsityPattern) and np.array_equal(self.P, other.P)

    def __hash__(self):
        return hash(self.P.tobytes())


def extract_pattern(X_opt, eps: float) -> SparsityPattern:
    """Threshold |X_ij| > eps into a pattern; the diagonal is forced to 1.

    Absolute values are used deliberately: negative code coefficients are
    legitimate over the reals and must not be classified as zeros.
    """
    X_opt = linalg.as_matrix(X_opt, "X_opt")
    if X_opt.shape[0] != X_opt.shape[1]:
        raise InvalidInputError(f"X_opt must be square, got {X_opt.shape}")
    if eps <= 0:
        raise InvalidInputError(f"eps must be > 0, got {eps}")
    P = (np.abs(X_opt) > eps).astype(np.float64)
    np.fill_diagonal(P, 1.0)
    return SparsityPattern(P)


def _tangent_product_derivative(x: FactorPoint, xi: TangentVector) -> np.ndarray:
    """Derivative of X = U V^T along (xi_U, xi_V)."""
    return xi.xi_U @ x.V.T + x.U @ xi.xi_V.T


class RegularizedObjective:
    """Sparsity-seeking stage-1 cost with smoothing parameter eps > 0."""

    def __init__(self, K: int, rho: float = 0.001, eps: float = 0.01):
        if eps <= 0:
            raise InvalidInputError(f"eps must be > 0, got {eps}")
        if rho < 0:
            raise InvalidInputError(f"rho must be >= 0, got {rho}")
        self.K = int(K)
        self.rho = float(rho)
        self.eps = float(eps)

    def _check(self, x: FactorPoint) -> None:
        if x.K != self.K:
            raise InvalidInputError(f"point dimension {x.K} != objective {self.K}")

    def value(self, x: FactorPoint) -> float:
        self._check(x)
        return kernels.reg_value(x.product(), self.rho, self.eps)

    def egrad(self, x: FactorPoint) -> TangentVector:
        self._check(x)
        G = kernels.reg_gmat(x.product(), self.rho, self.eps)
        return TangentVector(G @ x.V, G.T @ x.U)

    def egrad_directional(self, x: FactorPoint, xi: TangentVector) -> TangentVector:
        self._check(x)
        X = x.product()
        Xdot = _tangent_product_derivative(x, xi)
        G = kernels.reg_gmat(X, self.rho, self.eps)
        Gdot = kernels.reg_gdot(X, Xdot, self.rho, self.eps)
        return TangentVector(
            Gdot @ x.V + G @ xi.xi_V, Gdot.T @ x.U + G.T @ xi.xi_U
        )


class RefinementObjective:
    """Stage-2 completion cost against a fixed sparsity pattern."""

    def __init__(self, pattern: SparsityPattern):
        self.pattern = pattern
        self.K = pattern.K
        self._zero_mask = np.ascontiguousarray(pattern.zero_mask())

    def _check(self, x: FactorPoint) -> None:
        if x.K != self.K:
            raise InvalidInputError(f"point dimension {x.K} != pattern {self.K}")

    def value(self, x: FactorPoint) -> float:
        self._check(x)
        return kernels.ref_value(x.product(), self._zero_mask)

    def egrad(self, x: FactorPoint) -> TangentVector:
        self._check(x)
        G = kernels.ref_gmat(x.product(), self._zero_mask)
        return TangentVector(G @ x.V, G.T @ x.U)

    def egrad_directional(self, x: FactorPoint, xi: TangentVector) -> TangentVector:
        self._check(x)
        Xdot = _tangent_product_derivative(x, xi)
        G = kernels.ref_gmat(x.product(), self._zero_mask)
        Gdot = kernels.ref_gdot(Xdot, self._zero_mask)
        return TangentVector(
            Gdot @ x.V + G @ xi.xi_V, Gdot.T @ x.U + G.T @ xi.xi_U
        )
