"""Competing methods: Gaussian ARMA, linear-model detector and Holt-Winters.

The ARMA model carries covariates in the recursion itself,

    y[t] = c + x[t] @ b + sum_i ar_i y[t-i] + sum_j ma_j e[t-j] + e[t],

and is estimated by conditional sum of squares with the first
``m = max(p, q)`` errors set to zero, mirroring the BBARMA conditioning.
"""
import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import linalg, optimize

from .exceptions import DetectionError, FitError
from .inference import decide, wald_statistic

__all__ = [
    "ArmaFit",
    "arma_fit",
    "arma_forecast",
    "arma_detect",
    "gaussian_detect",
    "HoltWintersFit",
    "holt_winters_fit",
    "holt_winters_fit_forecast",
]


@njit(cache=True)
def _arma_resid(y, X, params, p, q, m, want_jac):
    N = y.shape[0]
    l = X.shape[1]
    k = params.shape[0]
    e = np.zeros(N)
    J = np.zeros((N if want_jac else 0, k))
    for t in range(m, N):
        pred = params[0]
        for c in range(l):
            pred += X[t, c] * params[1 + c]
        for i in range(p):
            pred += params[1 + l + i] * y[t - i - 1]
        for j in range(q):
            pred += params[1 + l + p + j] * e[t - j - 1]
        e[t] = y[t] - pred
        if want_jac:
            J[t, 0] = -1.0
            for c in range(l):
                J[t, 1 + c] = -X[t, c]
            for i in range(p):
                J[t, 1 + l + i] = -y[t - i - 1]
            for j in range(q):
                J[t, 1 + l + p + j] = -e[t - j - 1]
            for j in range(q):
                w = params[1 + l + p + j]
                for a in range(k):
                    J[t, a] -= w * J[t - j - 1, a]
    return e, J


@dataclass(eq=False)
class ArmaFit:
    """Conditional-least-squares ARMA(X) fit.

    ``cov_matrix`` covers ``(intercept, beta_cov, ar, ma)`` in that order.
    """

    ar: np.ndarray
    ma: np.ndarray
    intercept: float
    beta_cov: np.ndarray
    sigma2: float
    cov_matrix: np.ndarray
    converged: bool
    resid: np.ndarray
    m: int

    @property
    def params(self):
        return np.concatenate([[self.intercept], self.beta_cov, self.ar, self.ma])


def _css_hessian(y, X, x, p, q, m):
    # central differences of the analytic CSS gradient 2 J'e
    def grad(v):
        e, J = _arma_resid(y, X, v, p, q, m, True)
        return 2.0 * J[m:].T @ e[m:]

    k = x.size
    H = np.empty((k, k))
    for a in range(k):
        h = 1e-5 * (1.0 + abs(x[a]))
        step = np.zeros(k)
        step[a] = h
        H[:, a] = (grad(x + step) - grad(x - step)) / (2.0 * h)
    return 0.5 * (H + H.T)


def arma_fit(y, X=None, p=1, q=0):
    """Fit an ARMA(p, q) model with covariates by conditional sum of squares.

    The covariance of the coefficients is ``2 sigma2 H^{-1}`` where ``H``
    is the numerical Hessian of the sum of squares; this equals
    ``sigma2 (Z'Z)^{-1}`` for a pure autoregression.
    """
    y = np.asarray(y, dtype=float)
    N = y.size
    X = np.zeros((N, 0)) if X is None else np.asarray(X, dtype=float).reshape(N, -1)
    l = X.shape[1]
    m = max(p, q)
    if N <= p + q + l + 2 + m:
        raise FitError(f"series of length {N} too short for ARMA({p},{q}) with {l} covariates")
    Z = np.column_stack([np.ones(N - m)] + [X[m:, c] for c in range(l)]
                        + [y[m - i:N - i] for i in range(1, p + 1)])
    start, *_ = np.linalg.lstsq(Z, y[m:], rcond=None)
    x0 = np.concatenate([start, np.zeros(q)])
    ok = True
    if q:
        def fun(v):
            return _arma_resid(y, X, v, p, q, m, False)[0][m:]

        def jac(v):
            return _arma_resid(y, X, v, p, q, m, True)[1][m:]

        sol = optimize.least_squares(fun, x0, jac=jac, method="lm", xtol=1e-12, ftol=1e-12)
        x = sol.x
        ok = bool(sol.success) and np.all(np.isfinite(x))
    else:
        x = x0
    e, _ = _arma_resid(y, X, x, p, q, m, False)
    sigma2 = float(np.sum(e[m:] ** 2) / (N - m))
    if q:
        H = _css_hessian(y, X, x, p, q, m)
    else:
        H = 2.0 * Z.T @ Z
    try:
        cov = 2.0 * sigma2 * linalg.inv(H)
    except linalg.LinAlgError:
        cov, ok = np.full((x.size, x.size), np.nan), False
    return ArmaFit(x[1 + l:1 + l + p], x[1 + l + p:], float(x[0]), x[1:1 + l],
                   sigma2, cov, ok, e, m)


def arma_forecast(fit_result, y, H, future_X=None):
    """Point forecasts with future errors set to zero."""
    y = list(np.asarray(y, dtype=float))
    e = list(fit_result.resid)
    l = fit_result.beta_cov.size
    Xf = np.zeros((H, 0)) if future_X is None else np.asarray(future_X, dtype=float).reshape(H, l)
    out = np.empty(H)
    for h in range(H):
        v = fit_result.intercept + Xf[h] @ fit_result.beta_cov
        v += sum(a * y[-i] for i, a in enumerate(fit_result.ar, start=1))
        v += sum(b * e[-j] for j, b in enumerate(fit_result.ma, start=1))
        out[h] = v
        y.append(v)
        e.append(0.0)
    return out


def arma_detect(y, s, p=1, q=1, pfa=0.05):
    """Wald test on the coefficient of ``s`` in an ARMA(p, q) + ``s`` model."""
    try:
        res = arma_fit(y, np.asarray(s, dtype=float)[:, None], p, q)
    except FitError as err:
        raise DetectionError(f"ARMA detector failed: {err}") from err
    if not res.converged or not np.isfinite(res.cov_matrix[1, 1]) or res.cov_matrix[1, 1] <= 0:
        raise DetectionError("ARMA detector failed: no usable covariance for the signal coefficient")
    stat = wald_statistic(res.beta_cov[0], res.cov_matrix[1, 1], 0.0)
    return decide(stat, 1, pfa, res.beta_cov.copy())


def gaussian_detect(y, s, pfa=0.05):
    """Linear-model detector: regress ``y`` on ``(1, s)`` with i.i.d. Gaussian errors."""
    y = np.asarray(y, dtype=float)
    s = np.asarray(s, dtype=float)
    if y.size < 10 or y.size != s.size:
        raise DetectionError("Gaussian detector needs at least 10 paired observations")
    sc = s - s.mean()
    sxx = float(sc @ sc)
    if sxx <= 1e-12 * max(1.0, float(s @ s)):
        raise DetectionError("candidate signal is constant; its coefficient is not identifiable")
    b = float(sc @ (y - y.mean())) / sxx
    yc = y - y.mean()
    resid = yc - b * sc
    rss = float(resid @ resid)
    # an exact fit up to round-off has an infinite statistic
    if rss <= 1e-24 * max(float(yc @ yc), 1e-300):
        rss = 0.0
    var_b = rss / (y.size - 2) / sxx
    stat = math.inf if var_b <= 0 else b * b / var_b
    return decide(stat, 1, pfa, np.array([b]))


@njit(cache=True)
def _hw_run(y, period, alpha, beta, gamma):
    N = y.shape[0]
    level = 0.0
    for i in range(period):
        level += y[i]
    level /= period
    trend = 0.0
    season = np.empty(N)
    for i in range(period):
        season[i] = y[i] - level
    sse = 0.0
    for t in range(period, N):
        s_old = season[t - period]
        err = y[t] - (level + trend + s_old)
        sse += err * err
        new_level = alpha * (y[t] - s_old) + (1.0 - alpha) * (level + trend)
        trend = beta * (new_level - level) + (1.0 - beta) * trend
        level = new_level
        season[t] = gamma * (y[t] - level) + (1.0 - gamma) * s_old
    return sse, level, trend, season[N - period:].copy()


@njit(cache=True)
def _hw_grid(y, period, grid):
    best = np.inf
    best_abc = np.zeros(3)
    for a in grid:
        for b in grid:
            for g in grid:
                sse = _hw_run(y, period, a, b, g)[0]
                if sse < best:
                    best = sse
                    best_abc[0], best_abc[1], best_abc[2] = a, b, g
    return best_abc, best


@dataclass(eq=False)
class HoltWintersFit:
    """Additive Holt-Winters state after the last observation.

    ``seasonal[i]`` is the component for the ``i``-th of the next
    ``period`` steps and sums to zero.
    """

    level: float
    trend: float
    seasonal: np.ndarray
    alpha: float
    beta: float
    gamma: float
    period: int
    sse: float

    def forecast(self, H):
        h = np.arange(1, H + 1)
        return self.level + h * self.trend + self.seasonal[(h - 1) % self.period]


def holt_winters_fit(y, period, grid_step=0.05):
    """Grid-search the smoothing constants minimising one-step squared error."""
    y = np.asarray(y, dtype=float)
    if y.size < 2 * period:
        raise FitError(f"Holt-Winters needs at least two seasons ({2 * period} values), got {y.size}")
    grid = np.round(np.arange(grid_step, 1.0 - 1e-9, grid_step), 10)
    abc, sse = _hw_grid(y, period, grid)
    _, level, trend, season = _hw_run(y, period, abc[0], abc[1], abc[2])
    # shifting a constant between level and seasonals leaves every forecast unchanged
    shift = season.mean()
    return HoltWintersFit(level + shift, trend, season - shift, *abc, int(period), float(sse))


def holt_winters_fit_forecast(y, period, H):
    return holt_winters_fit(y, period).forecast(H)
