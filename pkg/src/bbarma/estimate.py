"""Conditional maximum-likelihood estimation of BBARMA models."""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import _kernels
from .core import ModelSpec, ParamVector, SignalData, observed_information
from .exceptions import FitError, InitializationError
from .optimize import bfgs
from .special import normal_quantile

__all__ = [
    "FitOptions",
    "FitResult",
    "ols_init",
    "fit",
    "confidence_interval",
    "information_criteria",
    "select_order",
]


@dataclass(frozen=True)
class FitOptions:
    """Optimizer settings.

    ``grad_tol=None`` means ``1e-6 * (1 + |loglik|)`` evaluated at each iterate.
    """

    max_iters: int = 500
    grad_tol: float = None
    step_tol: float = 1e-10


@dataclass(eq=False)
class FitResult:
    spec: ModelSpec
    params_hat: ParamVector
    loglik: float
    n_obs: int
    info_matrix: np.ndarray
    info_inverse: np.ndarray
    std_err: np.ndarray
    aic: float
    sic: float
    hq: float
    n_iters: int
    converged: bool
    grad_norm: float
    message: str = ""
    score: np.ndarray = field(default=None, repr=False)

    @property
    def gamma(self):
        return self.params_hat.to_array()

    @property
    def singular_information(self):
        return self.info_inverse is None

    def summary(self):
        """Per-parameter rows ``(name, estimate, std_err, z, p_value)``."""
        from .special import chi2_sf

        rows = []
        for j, name in enumerate(self.spec.param_names()):
            est = float(self.gamma[j])
            if self.std_err is None:
                rows.append((name, est, math.nan, math.nan, math.nan))
                continue
            se = float(self.std_err[j])
            z = est / se if se > 0 else math.inf
            rows.append((name, est, se, z, float(chi2_sf(z * z, 1))))
        return rows


def information_criteria(loglik, n_params, n_obs):
    """Return ``(AIC, SIC, HQ)``; ``n_obs`` is the conditioned sample size ``N - m``."""
    aic = -2.0 * loglik + 2.0 * n_params
    sic = -2.0 * loglik + n_params * math.log(n_obs)
    hq = -2.0 * loglik + 2.0 * n_params * math.log(math.log(n_obs))
    return aic, sic, hq


def ols_init(spec, data):
    """Least-squares start: regress ``y*[n]`` on ``[1, x[n], y*[n-1..n-p]]``.

    ``theta`` starts at zero and the precision at one.

    Raises
    ------
    InitializationError
        If the design is too short or rank deficient.
    """
    m, l, p = spec.m, spec.n_covariates, spec.p
    n_rows = data.N - m
    if n_rows < 1 + l + p:
        raise InitializationError(f"need at least {1 + l + p} observations past the first {m}")
    cols = [np.ones(n_rows)] + [data.X[m:, c] for c in range(l)]
    cols += [data.ystar[m - i:data.N - i] for i in range(1, p + 1)]
    Z = np.column_stack(cols)
    names = ["intercept"] + [f"x{c + 1}" for c in range(l)] + [f"ylag{i}" for i in range(1, p + 1)]
    rank = np.linalg.matrix_rank(Z)
    if rank < Z.shape[1]:
        _, _, piv = linalg.qr(Z, pivoting=True, mode="economic")
        dropped = sorted(names[j] for j in piv[rank:])
        raise InitializationError(
            f"rank-deficient initialisation design; collinear columns: {', '.join(dropped)}")
    coef, *_ = np.linalg.lstsq(Z, data.ystar[m:], rcond=None)
    return ParamVector(coef[0], coef[1:1 + l], coef[1 + l:], np.zeros(spec.q), 1.0)


def _to_internal(params):
    g = params.to_array()
    g[-1] = math.log(g[-1])
    return g


def _from_internal(x, spec):
    g = np.array(x, dtype=float)
    g[-1] = math.exp(g[-1])
    return ParamVector.from_array(g, spec)


def _invert_information(info):
    try:
        c = linalg.cho_factor(info, lower=True)
    except linalg.LinAlgError:
        return None
    inv = linalg.cho_solve(c, np.eye(info.shape[0]))
    return 0.5 * (inv + inv.T)


def fit(spec, data, options=None, start=None):
    """Maximise the conditional log-likelihood by BFGS with the analytic score.

    The precision is optimised on the log scale; estimates, the score and the
    observed information are reported on the natural scale.

    Parameters
    ----------
    spec : ModelSpec
    data : SignalData
    options : FitOptions, optional
    start : ParamVector, optional
        Starting point; defaults to :func:`ols_init`.

    Returns
    -------
    FitResult
        ``converged`` is false when the iteration budget ran out; ``std_err``
        is None when the observed information is not positive definite.
    """
    options = options or FitOptions()
    if data.n_covariates != spec.n_covariates or data.K != spec.K:
        raise ValueError("data do not match the model spec")
    if data.N <= spec.m + spec.dim:
        raise FitError(f"signal of length {data.N} too short for {spec.dim} parameters")
    start = (start or ols_init(spec, data)).check(spec)
    args = (data.y, data.ystar, data.X, float(spec.K), spec.n_covariates,
            spec.p, spec.q, spec.link.code, spec.m, True, True)

    def neg(x):
        ll, g = _kernels.objective(x, *args)
        return -ll, -g

    def reported_grad(x, g):
        out = g.copy()
        out[-1] /= math.exp(x[-1])
        return out

    def converged(x, f, g):
        tol = options.grad_tol if options.grad_tol is not None else 1e-6 * (1.0 + abs(f))
        return np.max(np.abs(reported_grad(x, g))) <= tol

    x0 = _to_internal(start)
    f0, _ = neg(x0)
    if not math.isfinite(f0):
        raise FitError("log-likelihood is not finite at the starting values")
    res = bfgs(neg, x0, converged, h0_scale=1.0 / (1.0 + abs(f0)),
               max_iters=options.max_iters, step_tol=options.step_tol)
    params = _from_internal(res.x, spec)
    loglik = -res.fun
    grad = -reported_grad(res.x, res.grad)
    info = observed_information(spec, params, data)
    inv = _invert_information(info) if np.all(np.isfinite(info)) else None
    std_err = np.sqrt(np.diag(inv)) if inv is not None else None
    n_obs = data.N - spec.m
    aic, sic, hq = information_criteria(loglik, spec.dim, n_obs)
    return FitResult(spec, params, loglik, n_obs, info, inv, std_err, aic, sic, hq,
                     res.n_iters, res.converged, float(np.max(np.abs(grad))),
                     res.message, grad)


def confidence_interval(fit_result, alpha=0.05):
    """Wald intervals ``gamma_hat +/- z_{1-alpha/2} * std_err``, shape ``(dim, 2)``."""
    if fit_result.std_err is None:
        raise FitError("standard errors unavailable: observed information is singular")
    z = normal_quantile(1.0 - alpha / 2.0)
    g = fit_result.gamma
    half = z * fit_result.std_err
    return np.column_stack([g - half, g + half])


def select_order(data, max_p=2, max_q=2, criterion="aic", spec=None, options=None):
    """Exhaustive search over ``p <= max_p``, ``q <= max_q`` by an information criterion.

    Every candidate conditions on the same leading ``max(max_p, max_q)``
    observations, so the log-likelihoods are sums over a common window and
    the criteria are comparable. Candidates whose fit fails are skipped.

    Returns
    -------
    best : tuple of int
        The ``(p, q)`` minimising the criterion.
    table : dict
        ``{(p, q): value}`` with ``inf`` for failed candidates.
    """
    if criterion not in ("aic", "sic", "hq"):
        raise ValueError(f"unknown criterion {criterion!r}")
    base = spec or ModelSpec(p=0, q=0, n_covariates=data.n_covariates, K=data.K)
    m_max = max(max_p, max_q)
    table = {}
    for p in range(max_p + 1):
        for q in range(max_q + 1):
            cand = ModelSpec(p=p, q=q, n_covariates=base.n_covariates, K=base.K, link=base.link)
            cut = m_max - cand.m
            sub = SignalData(data.y[cut:], data.K, data.X[cut:])
            try:
                res = fit(cand, sub, options)
            except (FitError, InitializationError, ArithmeticError, np.linalg.LinAlgError):
                table[(p, q)] = math.inf
                continue
            table[(p, q)] = getattr(res, criterion) if res.converged else math.inf
    best = min(table, key=table.get)
    return best, table
