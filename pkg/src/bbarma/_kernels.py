"""Compiled recursions shared by estimation, inference and simulation.

Index conventions: arrays are zero-based, so the first conditioned
observation is ``i = m``. The linear-predictor parameters are laid out as
``lam = (zeta, beta[0:l], phi[0:p], theta[0:q])`` with ``k = 1 + l + p + q``.
"""
import math

import numpy as np
from numba import njit

from .links import inverse_with_derivatives
from .special import _digamma, _trigamma


@njit(cache=True)
def filter_kernel(ystar, X, zeta, beta, phi, theta, code, m, order):
    """Run the predictor recursion.

    ``order`` selects how much is propagated: 0 for ``eta``/``mu`` only,
    1 adds ``d eta / d lam`` and 2 adds ``d2 eta / d lam d lam``.
    Returns ``(eta, mu, mu_eta, mu_eta2, resid, D, H, bad)`` where ``bad`` is
    the first index with a non-finite predictor, or -1.
    """
    N = ystar.shape[0]
    l = beta.shape[0]
    p = phi.shape[0]
    q = theta.shape[0]
    k = 1 + l + p + q
    off_phi = 1 + l
    off_theta = 1 + l + p

    eta = np.full(N, np.nan)
    mu = np.full(N, np.nan)
    d1 = np.zeros(N)
    d2 = np.zeros(N)
    resid = np.zeros(N)
    D = np.zeros((N if order >= 1 else 0, k))
    H = np.zeros((N if order >= 2 else 0, k, k))

    for i in range(m, N):
        e = zeta
        for c in range(l):
            e += X[i, c] * beta[c]
        for a in range(p):
            e += phi[a] * ystar[i - a - 1]
        for j in range(q):
            if i - j - 1 >= m:
                e += theta[j] * resid[i - j - 1]
        if not math.isfinite(e):
            return eta, mu, d1, d2, resid, D, H, i
        eta[i] = e
        mu_i, g1, g2 = inverse_with_derivatives(code, e)
        mu[i] = mu_i
        d1[i] = g1
        d2[i] = g2
        resid[i] = ystar[i] - mu_i

        if order >= 1:
            D[i, 0] = 1.0
            for c in range(l):
                D[i, 1 + c] = X[i, c]
            for a in range(p):
                D[i, off_phi + a] = ystar[i - a - 1]
            for j in range(q):
                if i - j - 1 >= m:
                    D[i, off_theta + j] = resid[i - j - 1]
            for s in range(q):
                lag = i - s - 1
                if lag < m:
                    continue
                w = theta[s] * d1[lag]
                for a in range(k):
                    D[i, a] -= w * D[lag, a]

        if order >= 2:
            for s in range(q):
                lag = i - s - 1
                if lag < m:
                    continue
                w1 = theta[s] * d1[lag]
                w2 = theta[s] * d2[lag]
                for a in range(k):
                    for b in range(k):
                        H[i, a, b] -= w2 * D[lag, a] * D[lag, b] + w1 * H[lag, a, b]
                # theta_s appears both as a coefficient and through its driver
                ts = off_theta + s
                for a in range(k):
                    v = d1[lag] * D[lag, a]
                    H[i, a, ts] -= v
                    H[i, ts, a] -= v
    return eta, mu, d1, d2, resid, D, H, -1


# Above this argument the log-gamma and digamma differences below lose
# digits to cancellation, so the finite products are summed directly.
_RATIO_SWITCH = 1e5


@njit(cache=True)
def _lgamma_ratio(x, n):
    """``log Gamma(x + n) - log Gamma(x)`` for integer ``n >= 0``."""
    if n == 0:
        return 0.0
    if x < _RATIO_SWITCH:
        return math.lgamma(x + n) - math.lgamma(x)
    out = n * math.log(x)
    for i in range(1, n):
        out += math.log1p(i / x)
    return out


@njit(cache=True)
def _digamma_ratio(x, n):
    """``psi(x + n) - psi(x)``."""
    if x < _RATIO_SWITCH:
        return _digamma(x + n) - _digamma(x)
    out = 0.0
    for i in range(n):
        out += 1.0 / (x + i)
    return out


@njit(cache=True)
def _trigamma_ratio(x, n):
    """``psi'(x + n) - psi'(x)``."""
    if x < _RATIO_SWITCH:
        return _trigamma(x + n) - _trigamma(x)
    out = 0.0
    for i in range(n):
        out -= 1.0 / ((x + i) * (x + i))
    return out


@njit(cache=True)
def log_pf(y, K, mu, prec):
    """Beta-binomial log-probabilities, elementwise over ``y`` and ``mu``."""
    n = y.shape[0]
    out = np.empty(n)
    k = int(K)
    const = math.lgamma(K + 1.0) - _lgamma_ratio(prec, k)
    for i in range(n):
        yi = int(y[i])
        out[i] = (const - math.lgamma(yi + 1.0) - math.lgamma(K - yi + 1.0)
                  + _lgamma_ratio(mu[i] * prec, yi)
                  + _lgamma_ratio((1.0 - mu[i]) * prec, k - yi))
    return out


@njit(cache=True)
def loglik_terms(y, K, mu, prec, m):
    """Per-observation conditional log-likelihood for ``i >= m``."""
    return log_pf(y[m:], K, mu[m:], prec)


@njit(cache=True)
def mu_derivatives(y, K, mu, prec, m, second):
    """Derivatives of each likelihood term with respect to ``mu`` and ``prec``.

    Returns ``(Ups, dl_dprec, Ups_star, Ups_prec, Phi_star)``, each of length
    ``N - m``. ``dl/dmu = prec * Ups``; the last three are only filled when
    ``second`` is true.
    """
    N = y.shape[0]
    n = N - m
    ups = np.zeros(n)
    lp = np.zeros(n)
    ups_s = np.zeros(n)
    ups_p = np.zeros(n)
    phi_s = np.zeros(n)
    k = int(K)
    dg_prec = -_digamma_ratio(prec, k)
    tg_prec = -_trigamma_ratio(prec, k)
    for i in range(m, N):
        t = i - m
        yk = int(y[i])
        mi = mu[i]
        a = mi * prec
        b = (1.0 - mi) * prec
        da = _digamma_ratio(a, yk)
        db = _digamma_ratio(b, k - yk)
        ups[t] = da - db
        lp[t] = mi * da + (1.0 - mi) * db + dg_prec
        if second:
            ta = _trigamma_ratio(a, yk)
            tb = _trigamma_ratio(b, k - yk)
            ups_s[t] = prec * prec * (ta + tb)
            ups_p[t] = ups[t] + prec * (mi * ta - (1.0 - mi) * tb)
            phi_s[t] = tg_prec + mi * mi * ta + (1.0 - mi) ** 2 * tb
    return ups, lp, ups_s, ups_p, phi_s


@njit(cache=True)
def split_params(gamma, l, p, q):
    zeta = gamma[0]
    beta = gamma[1:1 + l].copy()
    phi = gamma[1 + l:1 + l + p].copy()
    theta = gamma[1 + l + p:1 + l + p + q].copy()
    return zeta, beta, phi, theta, gamma[1 + l + p + q]


@njit(cache=True)
def objective(gamma, y, ystar, X, K, l, p, q, code, m, log_prec, want_grad):
    """Conditional log-likelihood and score.

    ``gamma`` ends with ``log(prec)`` when ``log_prec`` is true, else ``prec``.
    The score is returned in the same parameterisation. A non-finite
    likelihood is reported as ``-inf`` with a zero gradient.
    """
    zeta, beta, phi, theta, last = split_params(gamma, l, p, q)
    prec = math.exp(last) if log_prec else last
    dim = gamma.shape[0]
    grad = np.zeros(dim)
    if not (prec > 0.0 and math.isfinite(prec)):
        return -math.inf, grad
    order = 1 if want_grad else 0
    eta, mu, d1, d2, resid, D, H, bad = filter_kernel(
        ystar, X, zeta, beta, phi, theta, code, m, order)
    if bad >= 0:
        return -math.inf, grad
    terms = loglik_terms(y, K, mu, prec, m)
    ll = 0.0
    for t in range(terms.shape[0]):
        ll += terms[t]
    if not math.isfinite(ll):
        return -math.inf, grad
    if want_grad:
        ups, lp, _, _, _ = mu_derivatives(y, K, mu, prec, m, False)
        k = dim - 1
        for i in range(m, y.shape[0]):
            w = prec * ups[i - m] * d1[i]
            for a in range(k):
                grad[a] += w * D[i, a]
            grad[k] += lp[i - m]
        if log_prec:
            grad[k] *= prec
        for a in range(dim):
            if not math.isfinite(grad[a]):
                return -math.inf, np.zeros(dim)
    return ll, grad


@njit(cache=True)
def simulate_kernel(rng, X, zeta, beta, phi, theta, prec, K, code, m):
    """Draw a signal of length ``X.shape[0]`` from the BBARMA recursion.

    The first ``m`` values are drawn with the unconditional predictor
    ``zeta + x beta`` and zero MA errors; they serve only as start-up lags.
    """
    N = X.shape[0]
    l = beta.shape[0]
    p = phi.shape[0]
    q = theta.shape[0]
    y = np.zeros(N, dtype=np.int64)
    ystar = np.zeros(N)
    resid = np.zeros(N)
    for i in range(N):
        e = zeta
        for c in range(l):
            e += X[i, c] * beta[c]
        if i >= m:
            for a in range(p):
                e += phi[a] * ystar[i - a - 1]
            for j in range(q):
                e += theta[j] * resid[i - j - 1]
        mu_i = inverse_with_derivatives(code, e)[0]
        pr = rng.beta(mu_i * prec, (1.0 - mu_i) * prec)
        y[i] = rng.binomial(K, pr)
        ystar[i] = y[i] / K
        if i >= m:
            resid[i] = ystar[i] - mu_i
    return y
