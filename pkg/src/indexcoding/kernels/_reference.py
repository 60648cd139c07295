"""Pure-numpy reference implementation of the elementwise objective kernels.

Shapes: X, Xdot, G are K-by-K float64 arrays; zero_mask is a K-by-K float64
0/1 array marking positions that the completion term penalizes (it is the
complement of a sparsity pattern, so its diagonal is always 0).
"""

import numpy as np

BACKEND_NAME = "numpy"


def reg_value(X, rho, eps):
    """0.5 * sum((X_ii - 1)^2) + rho * sum(sqrt(X_ij^2 + eps^2))."""
    d = np.diagonal(X) - 1.0
    return 0.5 * float(d @ d) + rho * float(np.sqrt(X * X + eps * eps).sum())


def reg_gmat(X, rho, eps):
    """Gradient of reg_value with respect to X.

    G = Diag(X_ii - 1) + rho * X / sqrt(X^2 + eps^2).
    """
    G = rho * (X / np.sqrt(X * X + eps * eps))
    idx = np.arange(X.shape[0])
    G[idx, idx] += X[idx, idx] - 1.0
    return G


def reg_gdot(X, Xdot, rho, eps):
    """Directional derivative of reg_gmat along Xdot.

    Gdot = Diag(Xdot_ii) + rho * Xdot * eps^2 / (X^2 + eps^2)^(3/2).
    """
    t = X * X + eps * eps
    Gdot = rho * eps * eps * (Xdot / (t * np.sqrt(t)))
    idx = np.arange(X.shape[0])
    Gdot[idx, idx] += Xdot[idx, idx]
    return Gdot


def ref_value(X, zero_mask):
    """0.5 * sum((X_ii - 1)^2) + 0.5 * ||zero_mask .* X||_F^2."""
    d = np.diagonal(X) - 1.0
    masked = zero_mask * X
    return 0.5 * float(d @ d) + 0.5 * float((masked * masked).sum())


def ref_gmat(X, zero_mask):
    """Gradient of ref_value with respect to X: Diag(X_ii - 1) + zero_mask .* X."""
    G = zero_mask * X
    idx = np.arange(X.shape[0])
    G[idx, idx] += X[idx, idx] - 1.0
    return G


def ref_gdot(Xdot, zero_mask):
    """Directional derivative of ref_gmat along Xdot (linear in Xdot)."""
    Gdot = zero_mask * Xdot
    idx = np.arange(Xdot.shape[0])
    Gdot[idx, idx] += Xdot[idx, idx]
    return Gdot
