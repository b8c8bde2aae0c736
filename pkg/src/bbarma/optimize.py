"""Dense BFGS with a strong-Wolfe line search.

Minimises a function supplied as ``fun_grad(x) -> (f, g)``. Non-finite
values of ``f`` are treated as ``+inf``: the line search shrinks the step
until it is back inside the region where the objective is defined.
"""
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["bfgs", "OptimizeResult"]


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    n_iters: int
    n_evals: int
    converged: bool
    message: str


class _Counter:
    def __init__(self, fun_grad):
        self.fun_grad = fun_grad
        self.n = 0

    def __call__(self, x):
        self.n += 1
        f, g = self.fun_grad(x)
        if not math.isfinite(f):
            return math.inf, g
        return f, g


def _interpolate(a_lo, f_lo, d_lo, a_hi, f_hi):
    # minimiser of the quadratic through (a_lo, f_lo, d_lo) and (a_hi, f_hi)
    da = a_hi - a_lo
    denom = 2.0 * (f_hi - f_lo - d_lo * da)
    if math.isfinite(f_hi) and denom > 0:
        a = a_lo - d_lo * da * da / denom
        lo, hi = sorted((a_lo, a_hi))
        span = hi - lo
        if lo + 0.1 * span <= a <= hi - 0.1 * span:
            return a
    return a_lo + 0.5 * da


def wolfe_search(phi, f0, d0, alpha0=1.0, c1=1e-4, c2=0.9, max_evals=40):
    """Strong-Wolfe step along a descent direction.

    ``phi(alpha)`` returns ``(f, dphi, x, g)``. Returns the accepted tuple
    ``(alpha, f, x, g)`` or ``None`` when no acceptable step was found.
    """
    a_prev, f_prev, d_prev = 0.0, f0, d0
    alpha = alpha0
    best = None
    for it in range(max_evals):
        f, d, x, g = phi(alpha)
        if not math.isfinite(f):
            # left the domain: shrink towards the last good point
            alpha = a_prev + 0.25 * (alpha - a_prev)
            continue
        if f <= f0 + c1 * alpha * d0 and (best is None or f < best[1]):
            best = (alpha, f, x, g)
        if f > f0 + c1 * alpha * d0 or (it > 0 and f >= f_prev):
            return _zoom(phi, f0, d0, a_prev, f_prev, d_prev, alpha, f, c1, c2,
                         max_evals - it - 1, best)
        if abs(d) <= -c2 * d0:
            return alpha, f, x, g
        if d >= 0:
            return _zoom(phi, f0, d0, alpha, f, d, a_prev, f_prev, c1, c2,
                         max_evals - it - 1, best)
        a_prev, f_prev, d_prev = alpha, f, d
        alpha *= 2.0
    return best


def _zoom(phi, f0, d0, a_lo, f_lo, d_lo, a_hi, f_hi, c1, c2, budget, best):
    for _ in range(max(budget, 1)):
        alpha = _interpolate(a_lo, f_lo, d_lo, a_hi, f_hi)
        f, d, x, g = phi(alpha)
        if math.isfinite(f) and f <= f0 + c1 * alpha * d0 and (best is None or f < best[1]):
            best = (alpha, f, x, g)
        if not math.isfinite(f) or f > f0 + c1 * alpha * d0 or f >= f_lo:
            a_hi, f_hi = alpha, f
        else:
            if abs(d) <= -c2 * d0:
                return alpha, f, x, g
            if d * (a_hi - a_lo) >= 0:
                a_hi, f_hi = a_lo, f_lo
            a_lo, f_lo, d_lo = alpha, f, d
        if abs(a_hi - a_lo) < 1e-14:
            break
    return best


def bfgs(fun_grad, x0, converged, h0_scale=1.0, max_iters=500, step_tol=1e-10):
    """Minimise ``fun_grad`` from ``x0``.

    Parameters
    ----------
    fun_grad : callable
        ``x -> (f, g)``.
    x0 : ndarray
    converged : callable
        ``(x, f, g) -> bool``, the user's stopping rule on the gradient.
    h0_scale : float
        Initial inverse Hessian is ``h0_scale * I``.
    max_iters : int
    step_tol : float
        Stop when the accepted step has Euclidean norm at most this.
    """
    fg = _Counter(fun_grad)
    x = np.asarray(x0, dtype=float).copy()
    f, g = fg(x)
    if not math.isfinite(f):
        return OptimizeResult(x, f, g, 0, fg.n, False, "objective not finite at the start")
    n = x.size
    Hinv = np.eye(n) * h0_scale
    first_update = True
    message = "maximum number of iterations reached"
    ok = False
    it = 0
    while it < max_iters:
        if converged(x, f, g):
            ok, message = True, "gradient tolerance reached"
            break
        it += 1
        p = -Hinv @ g
        d0 = float(p @ g)
        if not d0 < 0:
            # lost descent: restart from the scaled identity
            Hinv = np.eye(n) * h0_scale
            p = -Hinv @ g
            d0 = float(p @ g)
            first_update = True

        def line(alpha, x=x, p=p):
            xa = x + alpha * p
            fa, ga = fg(xa)
            return fa, float(ga @ p), xa, ga

        step = wolfe_search(line, f, d0)
        if step is None:
            if first_update:
                message = "line search failed"
                break
            Hinv = np.eye(n) * h0_scale
            first_update = True
            continue
        alpha, f_new, x_new, g_new = step
        s = x_new - x
        yv = g_new - g
        x, f, g = x_new, f_new, g_new
        if np.linalg.norm(s) <= step_tol:
            ok = True
            message = "step tolerance reached"
            break
        sy = float(s @ yv)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(yv):
            if first_update:
                Hinv = np.eye(n) * (sy / float(yv @ yv))
                first_update = False
            rho = 1.0 / sy
            Hy = Hinv @ yv
            Hinv = (Hinv - rho * (np.outer(s, Hy) + np.outer(Hy, s))
                    + (rho * rho * float(yv @ Hy) + rho) * np.outer(s, s))
    else:
        if converged(x, f, g):
            ok, message = True, "gradient tolerance reached"
    return OptimizeResult(x, f, g, it, fg.n, ok, message)
