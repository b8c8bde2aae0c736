"""Special functions and quantiles used by the likelihood and the tests.

The digamma and trigamma kernels are compiled with numba so that the
likelihood kernels in :mod:`bbarma._kernels` can call them per observation.
Both shift the argument upward with the unit recurrence until it reaches 8
and then evaluate the asymptotic (Bernoulli) series, which is accurate to
about 1e-15 from that point on.
"""
import math

import numpy as np
from numba import njit
from scipy import special as _sp

from .exceptions import DomainError

__all__ = [
    "log_gamma",
    "digamma",
    "trigamma",
    "chi2_cdf",
    "chi2_sf",
    "chi2_quantile",
    "normal_cdf",
    "normal_quantile",
]

_ASYMPTOTIC_START = 8.0


@njit(cache=True)
def _digamma(x):
    acc = 0.0
    while x < _ASYMPTOTIC_START:
        acc -= 1.0 / x
        x += 1.0
    r = 1.0 / (x * x)
    series = r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (
        1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12.0))))))
    return acc + math.log(x) - 0.5 / x - series


@njit(cache=True)
def _trigamma(x):
    acc = 0.0
    while x < _ASYMPTOTIC_START:
        acc += 1.0 / (x * x)
        x += 1.0
    r = 1.0 / (x * x)
    series = (1.0 / 6 - r * (1.0 / 30 - r * (1.0 / 42 - r * (
        1.0 / 30 - r * (5.0 / 66 - r * (691.0 / 2730 - r * 7.0 / 6))))))
    return acc + 1.0 / x + 0.5 * r + series * r / x


@njit(cache=True)
def _digamma_array(z):
    out = np.empty_like(z)
    for i in range(z.size):
        out.flat[i] = _digamma(z.flat[i])
    return out


@njit(cache=True)
def _trigamma_array(z):
    out = np.empty_like(z)
    for i in range(z.size):
        out.flat[i] = _trigamma(z.flat[i])
    return out


def _positive(z, name):
    arr = np.asarray(z, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"{name} requires z > 0")
    return arr


def _unwrap(out, z):
    return float(out) if np.ndim(z) == 0 else out


def log_gamma(z):
    """Natural log of the gamma function for ``z > 0`` (scalar or array)."""
    arr = _positive(z, "log_gamma")
    return _unwrap(_sp.gammaln(arr), z)


def digamma(z):
    """Digamma function ``d log Gamma(z) / dz`` for ``z > 0``."""
    arr = _positive(z, "digamma")
    return _unwrap(_digamma_array(np.atleast_1d(arr).copy()).reshape(arr.shape), z)


def trigamma(z):
    """Trigamma function, the derivative of :func:`digamma`, for ``z > 0``."""
    arr = _positive(z, "trigamma")
    return _unwrap(_trigamma_array(np.atleast_1d(arr).copy()).reshape(arr.shape), z)


def _check_dof(dof):
    if int(dof) != dof or dof < 1:
        raise DomainError(f"degrees of freedom must be a positive integer, got {dof}")
    return int(dof)


def chi2_cdf(x, dof):
    """Lower-tail probability of the chi-squared law with ``dof`` degrees of freedom."""
    dof = _check_dof(dof)
    return _unwrap(_sp.chdtr(dof, np.maximum(np.asarray(x, dtype=float), 0.0)), x)


def chi2_sf(x, dof):
    """Upper-tail probability ``1 - chi2_cdf(x, dof)`` without cancellation."""
    dof = _check_dof(dof)
    return _unwrap(_sp.chdtrc(dof, np.maximum(np.asarray(x, dtype=float), 0.0)), x)


def chi2_quantile(prob, dof):
    """Return ``eps`` with ``chi2_cdf(eps, dof) == prob``.

    Raises
    ------
    DomainError
        If ``prob`` is not in the open unit interval or ``dof < 1``.
    """
    dof = _check_dof(dof)
    p = np.asarray(prob, dtype=float)
    if not np.all((p > 0) & (p < 1)):
        raise DomainError("chi2_quantile requires 0 < prob < 1")
    return _unwrap(_sp.chdtri(dof, 1.0 - p), prob)


def normal_cdf(x):
    return _unwrap(_sp.ndtr(np.asarray(x, dtype=float)), x)


def normal_quantile(prob):
    """Standard normal inverse CDF for ``0 < prob < 1``."""
    p = np.asarray(prob, dtype=float)
    if not np.all((p > 0) & (p < 1)):
        raise DomainError("normal_quantile requires 0 < prob < 1")
    return _unwrap(_sp.ndtri(p), prob)
