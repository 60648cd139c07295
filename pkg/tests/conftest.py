import numpy as np

from indexcoding.manifold import (
    FactorPoint,
    TangentVector,
    metric,
    norm,
    project_horizontal,
    retract,
)


def random_point(K, r, rng, scale=None):
    if scale is None:
        scale = 1.0 / np.sqrt(r)
    return FactorPoint(
        scale * rng.standard_normal((K, r)), scale * rng.standard_normal((K, r))
    )


def random_tangent(x, rng):
    return TangentVector(
        rng.standard_normal(x.U.shape), rng.standard_normal(x.V.shape)
    )


def random_horizontal(x, rng):
    return project_horizontal(x, random_tangent(x, rng))


def directional_derivative(objective, x, xi, t=1e-6):
    """Central difference of the pullback t -> f(retract(x, t*xi))."""
    fp = objective.value(retract(x, t * xi))
    fm = objective.value(retract(x, -t * xi))
    return (fp - fm) / (2.0 * t)


def horizontal_basis(x):
    """Metric-orthonormal basis of the horizontal space at x."""
    K, r = x.K, x.r
    dim_total = 2 * K * r
    basis = []
    for idx in range(dim_total):
        amb = np.zeros(dim_total)
        amb[idx] = 1.0
        cand = project_horizontal(
            x,
            TangentVector(amb[: K * r].reshape(K, r), amb[K * r :].reshape(K, r)),
        )
        for b in basis:
            cand = cand - metric(x, cand, b) * b
        n = norm(x, cand)
        if n > 1e-8:
            basis.append((1.0 / n) * cand)
    assert len(basis) == 2 * K * r - r * r
    return basis
