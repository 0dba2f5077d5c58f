"""Damped Gauss-Newton (Levenberg-Marquardt) least squares.

Small self-contained solver for the low-dimensional smooth fits in this
package: numeric central-difference Jacobian, Marquardt diagonal damping,
box bounds enforced by projection, covariance from the normal equations
scaled by the reduced chi-square.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

_LAMBDA_MIN = 1e-14
_LAMBDA_MAX = 1e13


class SingularJacobianError(RuntimeError):
    """Normal equations are numerically singular at the optimum."""


@dataclass
class LMResult:
    x: np.ndarray
    converged: bool
    n_iter: int
    cost: float                      # sum of squared residuals
    n_residuals: int
    covariance: np.ndarray | None    # inv(J^T J) * reduced chi^2, if converged
    reduced_chi2: float | None
    message: str = ""
    one_sigma: np.ndarray = field(default=None)  # sqrt(diag(covariance))


def _project(x: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    return np.minimum(np.maximum(x, lower), upper)


def _step_into_box(x: np.ndarray, delta: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Apply a step, moving any component that would cross a finite bound
    halfway toward it instead.  Landing exactly on a bound (where the model
    may be flat, killing that Jacobian column) only happens when the
    iterate already sits there."""
    x_new = x + delta
    below = x_new < lower
    above = x_new > upper
    x_new[below] = 0.5 * (x[below] + lower[below])
    x_new[above] = 0.5 * (x[above] + upper[above])
    return x_new


def _jacobian(
    residual: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    scale: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    rel_step: float,
) -> np.ndarray:
    """Central differences; falls back to one-sided at an active bound."""
    r0 = None
    m = None
    cols = []
    for i in range(x.size):
        h = rel_step * max(abs(x[i]), scale[i])
        xp, xm = x.copy(), x.copy()
        xp[i] = x[i] + h
        xm[i] = x[i] - h
        if xp[i] > upper[i] or xm[i] < lower[i]:
            # one-sided difference staying inside the box
            if xp[i] > upper[i]:
                xp[i] = x[i]
            if xm[i] < lower[i]:
                xm[i] = x[i]
            if xp[i] == xm[i]:  # bound interval narrower than the step
                xp[i] = min(x[i] + h, upper[i])
                xm[i] = max(x[i] - h, lower[i])
            if r0 is None:
                r0 = residual(x)
        denom = xp[i] - xm[i]
        rp = residual(xp) if xp[i] != x[i] else r0
        rm = residual(xm) if xm[i] != x[i] else r0
        cols.append((np.asarray(rp) - np.asarray(rm)) / denom)
        if m is None:
            m = cols[-1].size
    return np.column_stack(cols)


def levenberg_marquardt(
    residual: Callable[[np.ndarray], np.ndarray],
    x0,
    lower=None,
    upper=None,
    max_iter: int = 200,
    xtol: float = 1e-9,
    gtol: float = 1e-10,
    rel_step: float = 1e-6,
) -> LMResult:
    """Minimize sum(residual(x)^2) over the box [lower, upper].

    Converged when the relative step norm drops below ``xtol`` or the
    gradient infinity-norm below ``gtol``.  An unconverged run is returned
    with ``converged=False`` and no covariance.
    """
    x = np.asarray(x0, dtype=float).copy()
    n = x.size
    lower = np.full(n, -np.inf) if lower is None else np.asarray(lower, dtype=float)
    upper = np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float)
    if np.any(lower > upper):
        raise ValueError("lower bound exceeds upper bound")
    x = _project(x, lower, upper)
    scale = np.where(x != 0.0, np.abs(x), 1.0)

    r = np.asarray(residual(x), dtype=float)
    if r.size < n:
        raise ValueError(f"need at least {n} residuals, got {r.size}")
    cost = float(r @ r)
    lam = None
    message = "max_iter reached"
    converged = False
    it = 0

    for it in range(1, max_iter + 1):
        jac = _jacobian(residual, x, scale, lower, upper, rel_step)
        jtj = jac.T @ jac
        grad = jac.T @ r
        if np.max(np.abs(grad)) < gtol:
            converged = True
            message = "gradient below gtol"
            break
        diag = np.maximum(np.diag(jtj), 1e-300)
        ref = np.maximum(np.abs(x), scale)
        if lam is None:
            lam = 1e-3
        accepted = False
        last_rel_dcost = np.inf
        while lam <= _LAMBDA_MAX:
            try:
                delta = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            if not np.all(np.isfinite(delta)):
                lam *= 10.0
                continue
            # keep the step inside the linearization's region of trust
            delta = np.clip(delta, -2.0 * ref, 2.0 * ref)
            x_new = _step_into_box(x, delta, lower, upper)
            r_new = np.asarray(residual(x_new), dtype=float)
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new):
                last_rel_dcost = abs(cost_new - cost) / max(cost, 1e-300)
            if np.isfinite(cost_new) and cost_new < cost:
                step = x_new - x
                x, r, cost = x_new, r_new, cost_new
                lam = max(lam / 5.0, _LAMBDA_MIN)
                accepted = True
                rel = float(np.linalg.norm(step)) / (float(np.linalg.norm(x)) + 1e-300)
                if rel < xtol:
                    converged = True
                    message = "step below xtol"
                break
            lam *= 10.0
        if not accepted:
            # fully damped steps no longer change the cost at all: the
            # iterate is at the numerical floor of the objective
            if last_rel_dcost < 1e-14:
                converged = True
                message = "cost decrease below machine precision"
            else:
                message = "damping exhausted without cost decrease"
            break
        if converged:
            break

    covariance = None
    reduced_chi2 = None
    one_sigma = None
    if converged:
        jac = _jacobian(residual, x, scale, lower, upper, rel_step)
        jtj = jac.T @ jac
        cond = np.linalg.cond(jtj)
        if not np.isfinite(cond) or cond > 1e15:
            raise SingularJacobianError(
                f"normal equations singular at the optimum (condition number {cond:.3e})"
            )
        dof = max(r.size - n, 1)
        reduced_chi2 = cost / dof
        covariance = np.linalg.inv(jtj) * reduced_chi2
        one_sigma = np.sqrt(np.maximum(np.diag(covariance), 0.0))

    return LMResult(
        x=x,
        converged=converged,
        n_iter=it,
        cost=cost,
        n_residuals=r.size,
        covariance=covariance,
        reduced_chi2=reduced_chi2,
        message=message,
        one_sigma=one_sigma,
    )
