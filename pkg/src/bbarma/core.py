"""Likelihood engine for the BBARMA(p, q) model.

The conditional mean of ``y[n] / K`` follows

    g(mu[n]) = zeta + x[n] @ beta + sum_i phi_i y*[n-i]
               + sum_j theta_j (y*[n-j] - mu[n-j])

with ``y*[n] = y[n] / K``, and ``y[n]`` given the past is beta-binomial with
mean ``mu[n]`` and precision ``prec``. Everything here conditions on the
first ``m = max(p, q)`` observations: their MA errors and predictor
sensitivities are taken as zero.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .exceptions import DomainError, NumericError
from .links import Link, get_link

__all__ = [
    "ModelSpec",
    "ParamVector",
    "SignalData",
    "FilterState",
    "DerivativeWorkspace",
    "filter_signal",
    "log_likelihood",
    "loglik_terms",
    "score",
    "observed_information",
    "derivative_workspace",
]


@dataclass(frozen=True)
class ModelSpec:
    """Model orders, covariate count, link and support bound."""

    p: int = 1
    q: int = 0
    n_covariates: int = 0
    K: int = 255
    link: Link = field(default_factory=lambda: Link("logit"))

    def __post_init__(self):
        for name in ("p", "q", "n_covariates"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v}")
            object.__setattr__(self, name, int(v))
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K}")
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "link", get_link(self.link))

    @property
    def m(self):
        return max(self.p, self.q)

    @property
    def dim(self):
        """Length of ``gamma = (zeta, beta, phi, theta, prec)``."""
        return self.n_covariates + self.p + self.q + 2

    def param_names(self):
        l, p, q = self.n_covariates, self.p, self.q
        return (["zeta"] + [f"beta{i + 1}" for i in range(l)]
                + [f"phi{i + 1}" for i in range(p)]
                + [f"theta{i + 1}" for i in range(q)] + ["precision"])


@dataclass(frozen=True)
class ParamVector:
    """``gamma = (zeta, beta, phi, theta, prec)``."""

    zeta: float
    beta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    phi: np.ndarray = field(default_factory=lambda: np.zeros(0))
    theta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    precision: float = 1.0

    def __post_init__(self):
        for name in ("beta", "phi", "theta"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        object.__setattr__(self, "zeta", float(self.zeta))
        object.__setattr__(self, "precision", float(self.precision))
        if not self.precision > 0:
            raise DomainError(f"precision must be positive, got {self.precision}")

    def to_array(self):
        return np.concatenate([[self.zeta], self.beta, self.phi, self.theta, [self.precision]])

    @classmethod
    def from_array(cls, gamma, spec):
        gamma = np.asarray(gamma, dtype=float)
        if gamma.shape != (spec.dim,):
            raise ValueError(f"expected {spec.dim} parameters, got shape {gamma.shape}")
        l, p, q = spec.n_covariates, spec.p, spec.q
        return cls(gamma[0], gamma[1:1 + l], gamma[1 + l:1 + l + p],
                   gamma[1 + l + p:1 + l + p + q], gamma[-1])

    def check(self, spec):
        if (self.beta.size, self.phi.size, self.theta.size) != (spec.n_covariates, spec.p, spec.q):
            raise ValueError(
                f"parameter sizes (l={self.beta.size}, p={self.phi.size}, q={self.theta.size}) "
                f"do not match the model spec {spec}")
        return self


@dataclass(frozen=True, eq=False)
class SignalData:
    """An integer signal on ``{0..K}`` and its covariate matrix.

    ``ystar = y / K`` is computed once at construction.
    """

    y: np.ndarray
    K: int
    X: np.ndarray = None

    def __post_init__(self):
        y = np.asarray(self.y)
        if y.ndim != 1:
            raise ValueError("y must be one-dimensional")
        if y.size and not np.all(np.floor(y) == y):
            raise DomainError("y must contain integers")
        y = y.astype(np.int64)
        if np.any(y < 0) or np.any(y > self.K):
            bad = int(np.flatnonzero((y < 0) | (y > self.K))[0])
            raise DomainError(f"y[{bad}] = {y[bad]} outside [0, {self.K}]")
        X = np.zeros((y.size, 0)) if self.X is None else np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] != y.size:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.size} values")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", np.ascontiguousarray(X))
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "ystar", y / float(self.K))

    @property
    def N(self):
        return self.y.size

    @property
    def n_covariates(self):
        return self.X.shape[1]


@dataclass(frozen=True, eq=False)
class FilterState:
    """Output of :func:`filter_signal`.

    ``eta`` and ``mu`` are NaN for the ``m`` conditioning indices.
    ``sens`` holds ``d eta[i] / d lam`` row-wise with columns ordered
    ``(zeta, beta, phi, theta)``; ``sens2`` the second derivatives when requested.
    """

    eta: np.ndarray
    mu: np.ndarray
    mu_eta: np.ndarray
    mu_eta2: np.ndarray
    resid_ma: np.ndarray
    sens: np.ndarray
    sens2: np.ndarray
    spec: ModelSpec

    def _cols(self, start, stop):
        return self.sens[:, start:stop]

    @property
    def sens_zeta(self):
        return self.sens[:, 0]

    @property
    def sens_beta(self):
        return self._cols(1, 1 + self.spec.n_covariates)

    @property
    def sens_phi(self):
        l = self.spec.n_covariates
        return self._cols(1 + l, 1 + l + self.spec.p)

    @property
    def sens_theta(self):
        l, p = self.spec.n_covariates, self.spec.p
        return self._cols(1 + l + p, 1 + l + p + self.spec.q)


def _check(spec, params, data):
    params.check(spec)
    if data.n_covariates != spec.n_covariates:
        raise ValueError(f"data has {data.n_covariates} covariates, spec expects {spec.n_covariates}")
    if data.K != spec.K:
        raise ValueError(f"data K={data.K} differs from spec K={spec.K}")


def filter_signal(spec, params, data, order=1):
    """Evaluate the predictor recursion and its parameter sensitivities.

    Parameters
    ----------
    spec : ModelSpec
    params : ParamVector
    data : SignalData
    order : {0, 1, 2}
        Highest derivative order of ``eta`` to propagate.

    Raises
    ------
    NumericError
        If the predictor becomes non-finite; ``err.index`` is the time index.
    """
    _check(spec, params, data)
    out = _kernels.filter_kernel(
        data.ystar, data.X, params.zeta, params.beta, params.phi, params.theta,
        spec.link.code, spec.m, order)
    eta, mu, d1, d2, resid, D, H, bad = out
    if bad >= 0:
        raise NumericError(f"non-finite linear predictor at index {bad}", index=int(bad))
    return FilterState(eta, mu, d1, d2, resid, D, H, spec)


def loglik_terms(spec, params, data, state=None):
    state = state if state is not None else filter_signal(spec, params, data, order=0)
    return _kernels.loglik_terms(data.y, float(spec.K), state.mu, params.precision, spec.m)


def log_likelihood(spec, params, data):
    """Conditional log-likelihood given the first ``m`` observations."""
    if data.N <= spec.m:
        warnings.warn("no observations beyond the conditioning window; log-likelihood is 0",
                      RuntimeWarning, stacklevel=2)
        return 0.0
    return float(np.sum(loglik_terms(spec, params, data)))


def score(spec, params, data):
    """Analytic score vector in the ``gamma`` layout."""
    _check(spec, params, data)
    ll, grad = _kernels.objective(
        params.to_array(), data.y, data.ystar, data.X, float(spec.K),
        spec.n_covariates, spec.p, spec.q, spec.link.code, spec.m, False, True)
    if not np.isfinite(ll):
        filter_signal(spec, params, data, order=0)
        raise NumericError("log-likelihood is not finite at these parameters")
    return grad


@dataclass(frozen=True, eq=False)
class DerivativeWorkspace:
    """Per-observation quantities feeding the observed information.

    All arrays cover the conditioned indices ``i = m..N-1``. ``T`` is
    ``1/g'(mu) = dmu/deta``; ``kappa`` is ``g''/g'^2``; ``xi`` is the
    weight of the outer-product term, so that
    ``I[lam, lam] = D' diag(xi) D - sum_i prec * Ups[i] * T[i] * sens2[i]``.
    """

    Upsilon: np.ndarray
    UpsilonStar: np.ndarray
    UpsilonPhi: np.ndarray
    PhiStar: np.ndarray
    kappa: np.ndarray
    xi: np.ndarray
    T: np.ndarray
    sens: np.ndarray
    sens2: np.ndarray
    precision: float


def derivative_workspace(spec, params, data):
    state = filter_signal(spec, params, data, order=2)
    m = spec.m
    ups, _, ups_s, ups_p, phi_s = _kernels.mu_derivatives(
        data.y, float(spec.K), state.mu, params.precision, m, True)
    T = state.mu_eta[m:]
    # kappa = g''/g'^2 written through d2mu/deta2 = -g''/g'^3
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = -state.mu_eta2[m:] / T
    prec = params.precision
    # kappa * T taken as -d2mu/deta2 so a saturated mu (T = 0) stays finite
    xi = -prec * state.mu_eta2[m:] * ups - ups_s * T**2
    return DerivativeWorkspace(ups, ups_s, ups_p, phi_s, kappa, xi, T,
                               state.sens[m:], state.sens2[m:], prec)


def observed_information(spec, params, data, workspace=None):
    """Negative Hessian of the conditional log-likelihood in the ``gamma`` layout."""
    ws = workspace if workspace is not None else derivative_workspace(spec, params, data)
    D = ws.sens
    curl_w = ws.precision * ws.Upsilon * ws.T
    lam = D.T @ (ws.xi[:, None] * D) - np.einsum("n,nab->ab", curl_w, ws.sens2)
    cross = -D.T @ (ws.T * ws.UpsilonPhi)
    k = D.shape[1]
    info = np.empty((k + 1, k + 1))
    info[:k, :k] = 0.5 * (lam + lam.T)
    info[:k, k] = cross
    info[k, :k] = cross
    info[k, k] = -np.sum(ws.PhiStar)
    return info
