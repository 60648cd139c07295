"""Riemannian trust-region solver on the fixed-rank quotient geometry.

Outer loop: classic ratio-controlled trust region with an additive-retraction
step and radius schedule shrink x0.25 / expand x2 (capped).  Inner loop:
Steihaug-Toint truncated conjugate gradient on the horizontal space at the
current point, using the quotient metric for all inner products.  Tangent
vectors are reused at a fixed base point inside the inner loop; no transport
is needed there, and all state is rebuilt at each new outer iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import NumericalFailureError, RetractionFailureError
from .manifold import (
    FactorPoint,
    TangentVector,
    egrad_to_rgrad,
    metric,
    norm,
    retract,
    rhess_apply,
)

MAX_STEP_HALVINGS = 10


@dataclass
class TrustRegionConfig:
    max_iterations: int = 100
    grad_norm_tol: float = 1e-6
    delta0: float = 1.0
    delta_max: float = 2.0**10
    rho_accept: float = 0.1
    tcg_max_inner: Optional[int] = None  # defaults to 2*K*r at solve time
    tcg_kappa: float = 0.1
    tcg_theta: float = 1.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (0.0 < self.rho_accept < 1.0):
            raise ValueError("rho_accept must lie in (0, 1)")
        for name in ("grad_norm_tol", "delta0", "delta_max", "tcg_kappa", "tcg_theta"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.delta0 > self.delta_max:
            raise ValueError("delta0 must not exceed delta_max")


@dataclass
class SolveResult:
    point: FactorPoint
    value: float
    grad_norm: float
    iterations: int
    status: str  # converged | iteration-limit | step-failure | numerical-failure


@dataclass
class IterationRecord:
    """Per-iteration trace line for verbose runs."""

    iteration: int
    value: float
    grad_norm: float
    delta: float
    ratio: float
    inner_iterations: int
    accepted: bool


class TcgResult(NamedTuple):
    step: TangentVector
    hit_boundary: bool
    model_decrease: float
    inner_iterations: int


def tcg_subproblem(
    x: FactorPoint,
    rgrad: TangentVector,
    hess_op: Callable[[TangentVector], TangentVector],
    delta: float,
    cfg: TrustRegionConfig,
) -> TcgResult:
    """Minimize the quadratic model within metric-radius delta.

    Terminates on the boundary (negative curvature or radius intersection),
    on the residual dropping below ||r0|| * min(kappa, ||r0||^theta), or on
    the inner-iteration cap.  The first step coincides with the Cauchy step,
    so the returned decrease is never worse than the Cauchy decrease.
    """
    K, r = x.K, x.r
    max_inner = cfg.tcg_max_inner if cfg.tcg_max_inner is not None else 2 * K * r

    eta = TangentVector.zero(K, r)
    res = rgrad
    res_sq = metric(x, res, res)
    if res_sq == 0.0:
        return TcgResult(eta, False, 0.0, 0)
    res_norm0 = math.sqrt(res_sq)
    target = res_norm0 * min(cfg.tcg_kappa, res_norm0**cfg.tcg_theta)

    d = -res
    eta_sq = 0.0
    model_delta = 0.0  # m(eta) - m(0), tracked incrementally
    delta_sq = delta * delta

    for inner in range(1, max_inner + 1):
        Hd = hess_op(d)
        d_Hd = metric(x, d, Hd)
        if not np.isfinite(d_Hd):
            raise NumericalFailureError("Hessian action returned non-finite values")
        eta_d = metric(x, eta, d)
        d_sq = metric(x, d, d)

        if d_Hd <= 0.0:
            tau = _boundary_tau(eta_d, d_sq, eta_sq, delta_sq)
            model_delta += tau * metric(x, res, d) + 0.5 * tau * tau * d_Hd
            return TcgResult(eta + tau * d, True, -model_delta, inner)

        alpha = res_sq / d_Hd
        eta_sq_next = eta_sq + 2.0 * alpha * eta_d + alpha * alpha * d_sq
        if eta_sq_next >= delta_sq:
            tau = _boundary_tau(eta_d, d_sq, eta_sq, delta_sq)
            model_delta += tau * metric(x, res, d) + 0.5 * tau * tau * d_Hd
            return TcgResult(eta + tau * d, True, -model_delta, inner)

        model_delta -= 0.5 * alpha * res_sq
        eta = eta + alpha * d
        eta_sq = eta_sq_next
        res = res + alpha * Hd
        res_sq_next = metric(x, res, res)
        if math.sqrt(res_sq_next) <= target:
            return TcgResult(eta, False, -model_delta, inner)
        beta = res_sq_next / res_sq
        d = -res + beta * d
        res_sq = res_sq_next

    return TcgResult(eta, False, -model_delta, max_inner)


def _boundary_tau(eta_d: float, d_sq: float, eta_sq: float, delta_sq: float) -> float:
    """Positive root of ||eta + tau d||^2 = delta^2."""
    disc = eta_d * eta_d + d_sq * (delta_sq - eta_sq)
    return (-eta_d + math.sqrt(max(disc, 0.0))) / d_sq


def tr_solve(
    objective,
    x0: FactorPoint,
    cfg: Optional[TrustRegionConfig] = None,
    trace_fn: Optional[Callable[[IterationRecord], None]] = None,
) -> SolveResult:
    """Run the trust-region method from x0 on an objective exposing
    value / egrad / egrad_directional.

    Accepted iterations never increase the objective.  The returned status is
    one of converged, iteration-limit, step-failure, numerical-failure.
    """
    if cfg is None:
        cfg = TrustRegionConfig()

    x = x0
    f = objective.value(x)
    if not np.isfinite(f):
        return SolveResult(x, f, float("inf"), 0, "numerical-failure")

    delta = cfg.delta0
    # Ratio stabilizer against floating-point noise once f - f_new reaches
    # rounding level.
    rho_reg = 1e3 * np.finfo(float).eps * max(1.0, abs(f))

    iterations = 0
    status = "iteration-limit"
    gnorm = float("inf")

    while True:
        egrad = objective.egrad(x)
        rgrad = egrad_to_rgrad(x, egrad)
        gnorm = norm(x, rgrad)
        if not np.isfinite(gnorm):
            status = "numerical-failure"
            break
        if gnorm <= cfg.grad_norm_tol:
            status = "converged"
            break
        if iterations >= cfg.max_iterations:
            status = "iteration-limit"
            break

        def hess_op(xi, _x=x, _egrad=egrad):
            return rhess_apply(_x, xi, _egrad, objective.egrad_directional(_x, xi))

        tcg = tcg_subproblem(x, rgrad, hess_op, delta, cfg)
        iterations += 1

        step, tau, x_new = tcg.step, 1.0, None
        for _ in range(MAX_STEP_HALVINGS + 1):
            try:
                x_new = retract(x, tau * step)
                break
            except RetractionFailureError:
                tau *= 0.5
        if x_new is None:
            status = "step-failure"
            break

        if tau < 1.0:
            g_s = metric(x, rgrad, step)
            s_Hs = metric(x, step, hess_op(step))
            model_decrease = -(tau * g_s + 0.5 * tau * tau * s_Hs)
            hit_boundary = False
        else:
            model_decrease = tcg.model_decrease
            hit_boundary = tcg.hit_boundary

        f_new = objective.value(x_new)
        if not np.isfinite(f_new):
            status = "numerical-failure"
            break

        rho = (f - f_new + rho_reg) / (model_decrease + rho_reg)
        accepted = rho > cfg.rho_accept and f_new <= f
        if accepted:
            x, f = x_new, f_new

        if trace_fn is not None:
            trace_fn(
                IterationRecord(
                    iteration=iterations,
                    value=f,
                    grad_norm=gnorm,
                    delta=delta,
                    ratio=rho,
                    inner_iterations=tcg.inner_iterations,
                    accepted=accepted,
                )
            )

        # every rejected step shrinks the radius, including steps rejected by
        # the monotonicity guard when the ratio is regularization noise
        if rho < 0.25 or not accepted:
            delta *= 0.25
        elif rho > 0.75 and hit_boundary:
            delta = min(2.0 * delta, cfg.delta_max)
        if delta < 1e-15 * cfg.delta0:
            # radius collapsed to rounding level; no further progress possible
            gnorm = norm(x, egrad_to_rgrad(x, objective.egrad(x)))
            status = "iteration-limit"
            break

    return SolveResult(x, f, gnorm, iterations, status)
