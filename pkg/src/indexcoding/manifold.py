"""Quotient geometry of rank-r K-by-K matrices factorized as X = U V^T.

The factorization is invariant under (U, V) -> (U M^{-1}, V M^T) for any
invertible r-by-r M, so optimization is carried out on the quotient of the
factor space by that group action.  Concretely every abstract tangent vector
is represented by its horizontal lift: the unique representative (xi_U, xi_V)
satisfying

    U^T xi_U (V^T V) = (U^T U) xi_V^T V.

The metric is the block Gram-weighted inner product

    g((xi_U, xi_V), (eta_U, eta_V))
        = Tr((V^T V) xi_U^T eta_U) + Tr((U^T U) xi_V^T eta_V),

under which the quotient is a Riemannian submersion; gradient, connection and
Hessian formulas below are the standard matrix expressions for this geometry.
All (.^T .)^{-1} applications go through Cholesky solves of the cached Gram
matrices, never explicit inverses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InvalidInputError, RankDeficiencyError, RetractionFailureError

# Full-column-rank test: smallest singular value must exceed this times the
# largest one.
FACTOR_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class TangentVector:
    """A direction (xi_U, xi_V) in the factor space at some FactorPoint."""

    xi_U: np.ndarray
    xi_V: np.ndarray

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.xi_U + other.xi_U, self.xi_V + other.xi_V)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.xi_U - other.xi_U, self.xi_V - other.xi_V)

    def __mul__(self, scalar: float) -> "TangentVector":
        return TangentVector(self.xi_U * scalar, self.xi_V * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(-self.xi_U, -self.xi_V)

    @property
    def shape(self):
        return self.xi_U.shape

    @staticmethod
    def zero(K: int, r: int) -> "TangentVector":
        return TangentVector(np.zeros((K, r)), np.zeros((K, r)))


class FactorPoint:
    """A rank-r point (U, V) with cached Gram matrices and their Cholesky factors.

    Immutable after construction; the factor arrays are made read-only.
    Construction validates that both factors have full column rank.
    """

    __slots__ = ("U", "V", "gram_U", "gram_V", "_chol_U", "_chol_V", "_X")

    def __init__(self, U, V):
        # private copies: the originals stay writable in the caller's hands
        U = linalg.as_matrix(U, "U").copy()
        V = linalg.as_matrix(V, "V").copy()
        if U.shape != V.shape:
            raise InvalidInputError(f"factor shapes differ: {U.shape} vs {V.shape}")
        K, r = U.shape
        if r > K:
            raise InvalidInputError(f"rank {r} exceeds dimension {K}")
        for name, M in (("U", U), ("V", V)):
            sv = np.linalg.svd(M, compute_uv=False)
            if sv[-1] <= FACTOR_RANK_RTOL * sv[0]:
                raise RankDeficiencyError(
                    f"factor {name} is rank-deficient "
                    f"(singular values {sv[0]:.3e} .. {sv[-1]:.3e})"
                )
        U.flags.writeable = False
        V.flags.writeable = False
        self.U = U
        self.V = V
        self.gram_U = U.T @ U
        self.gram_V = V.T @ V
        try:
            # Gram conditioning is the squared factor conditioning, so the
            # Cholesky can fail even after the singular-value test above.
            self._chol_U = linalg.spd_factor(self.gram_U)
            self._chol_V = linalg.spd_factor(self.gram_V)
        except np.linalg.LinAlgError as exc:
            raise RankDeficiencyError(f"Gram factorization failed: {exc}") from exc
        self._X = None

    @property
    def K(self) -> int:
        return self.U.shape[0]

    @property
    def r(self) -> int:
        return self.U.shape[1]

    def product(self) -> np.ndarray:
        """The represented matrix X = U V^T (cached)."""
        if self._X is None:
            X = self.U @ self.V.T
            X.flags.writeable = False
            self._X = X
        return self._X

    def solve_gram_U(self, b) -> np.ndarray:
        """(U^T U)^{-1} b via the cached Cholesky factor."""
        return linalg.spd_solve_factored(self._chol_U, b)

    def solve_gram_V(self, b) -> np.ndarray:
        """(V^T V)^{-1} b via the cached Cholesky factor."""
        return linalg.spd_solve_factored(self._chol_V, b)

    def random_tangent(self, rng) -> TangentVector:
        """Ambient Gaussian direction (not horizontal; project if needed)."""
        return TangentVector(
            rng.standard_normal(self.U.shape), rng.standard_normal(self.V.shape)
        )


def _check_shapes(x: FactorPoint, *vecs: TangentVector) -> None:
    for v in vecs:
        if v.xi_U.shape != x.U.shape or v.xi_V.shape != x.V.shape:
            raise InvalidInputError(
                f"tangent shape {v.xi_U.shape}/{v.xi_V.shape} does not match "
                f"point shape {x.U.shape}"
            )


def metric(x: FactorPoint, xi: TangentVector, eta: TangentVector) -> float:
    """Gram-weighted inner product of two tangent vectors at x."""
    _check_shapes(x, xi, eta)
    return float(
        np.sum((xi.xi_U @ x.gram_V) * eta.xi_U)
        + np.sum((xi.xi_V @ x.gram_U) * eta.xi_V)
    )


def norm(x: FactorPoint, xi: TangentVector) -> float:
    return np.sqrt(max(metric(x, xi, xi), 0.0))


def project_horizontal(x: FactorPoint, eta: TangentVector) -> TangentVector:
    """Project a tangent vector onto the horizontal space at x.

    Returns (eta_U + U L, eta_V - V L^T) with
    L = 0.5 [eta_V^T V (V^T V)^{-1} - (U^T U)^{-1} U^T eta_U]; the result
    satisfies the horizontal-space condition and the map is idempotent.
    """
    _check_shapes(x, eta)
    # right-multiplication by (V^T V)^{-1} done as a transposed solve
    t1 = x.solve_gram_V(x.V.T @ eta.xi_V).T
    t2 = x.solve_gram_U(x.U.T @ eta.xi_U)
    lam = 0.5 * (t1 - t2)
    return TangentVector(eta.xi_U + x.U @ lam, eta.xi_V - x.V @ lam.T)


def horizontality_residual(x: FactorPoint, xi: TangentVector) -> float:
    """Relative residual of the horizontal-space condition (0 for horizontal)."""
    lhs = x.U.T @ xi.xi_U @ x.gram_V
    rhs = x.gram_U @ xi.xi_V.T @ x.V
    scale = (
        np.linalg.norm(x.U) * np.linalg.norm(xi.xi_U) * np.linalg.norm(x.gram_V)
        + np.linalg.norm(x.gram_U) * np.linalg.norm(xi.xi_V) * np.linalg.norm(x.V)
    )
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(lhs - rhs) / scale)


def egrad_to_rgrad(x: FactorPoint, egrad: TangentVector) -> TangentVector:
    """Map Euclidean partials (f_U, f_V) to the Riemannian gradient.

    The scaled pair (f_U (V^T V)^{-1}, f_V (U^T U)^{-1}) is horizontal for any
    objective invariant under the factorization symmetry; the final projection
    only guards against floating-point drift.
    """
    raw = _scale_egrad(x, egrad)
    return project_horizontal(x, raw)


def _scale_egrad(x: FactorPoint, egrad: TangentVector) -> TangentVector:
    _check_shapes(x, egrad)
    return TangentVector(
        x.solve_gram_V(egrad.xi_U.T).T, x.solve_gram_U(egrad.xi_V.T).T
    )


def _sym(z: np.ndarray) -> np.ndarray:
    return 0.5 * (z + z.T)


def _connection_correction(
    x: FactorPoint, xi: TangentVector, eta: TangentVector
) -> TangentVector:
    """Christoffel-type correction (A_U, A_V) of the total-space connection."""
    a_u = (
        eta.xi_U @ _sym(xi.xi_V.T @ x.V)
        + xi.xi_U @ _sym(eta.xi_V.T @ x.V)
        - x.U @ _sym(eta.xi_V.T @ xi.xi_V)
    )
    a_v = (
        eta.xi_V @ _sym(xi.xi_U.T @ x.U)
        + xi.xi_V @ _sym(eta.xi_U.T @ x.U)
        - x.V @ _sym(eta.xi_U.T @ xi.xi_U)
    )
    return TangentVector(x.solve_gram_V(a_u.T).T, x.solve_gram_U(a_v.T).T)


def connection(
    x: FactorPoint,
    xi: TangentVector,
    eta_field_value: TangentVector,
    eta_directional: TangentVector,
) -> TangentVector:
    """Covariant derivative of a vector field eta along xi in the total space.

    The caller supplies the field's value at x and its Euclidean directional
    derivative D eta[xi]; the result is D eta[xi] plus the metric's
    Christoffel correction.
    """
    _check_shapes(x, xi, eta_field_value, eta_directional)
    return eta_directional + _connection_correction(x, xi, eta_field_value)


def rhess_apply(
    x: FactorPoint,
    xi: TangentVector,
    egrad: TangentVector,
    egrad_directional: TangentVector,
) -> TangentVector:
    """Riemannian Hessian action on a horizontal xi.

    Forms the covariant derivative of the Riemannian gradient field along xi
    and projects it back to the horizontal space.  The derivative of the
    Gram-inverse scaling is included via the product rule:

        D[f_U (V^T V)^{-1}][xi]
            = (D f_U[xi]) (V^T V)^{-1}
              - f_U (V^T V)^{-1} (xi_V^T V + V^T xi_V) (V^T V)^{-1}

    and symmetrically for the V component.
    """
    _check_shapes(x, xi, egrad, egrad_directional)
    rgrad = _scale_egrad(x, egrad)
    gdot_v = xi.xi_V.T @ x.V + x.V.T @ xi.xi_V
    gdot_u = xi.xi_U.T @ x.U + x.U.T @ xi.xi_U
    d_rgrad_u = x.solve_gram_V((egrad_directional.xi_U - rgrad.xi_U @ gdot_v).T).T
    d_rgrad_v = x.solve_gram_U((egrad_directional.xi_V - rgrad.xi_V @ gdot_u).T).T
    nabla = TangentVector(d_rgrad_u, d_rgrad_v) + _connection_correction(x, xi, rgrad)
    return project_horizontal(x, nabla)


def retract(x: FactorPoint, xi: TangentVector) -> FactorPoint:
    """Additive retraction (U + xi_U, V + xi_V) with refreshed caches.

    Raises RetractionFailureError when the updated factors lose full column
    rank; callers respond by shrinking the step.
    """
    _check_shapes(x, xi)
    try:
        return FactorPoint(x.U + xi.xi_U, x.V + xi.xi_V)
    except RankDeficiencyError as exc:
        raise RetractionFailureError(str(exc)) from exc
