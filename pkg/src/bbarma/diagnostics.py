"""Residuals, correlograms and portmanteau tests for fitted models."""
from dataclasses import dataclass

import numpy as np

from .core import filter_signal
from .exceptions import DiagnosticError
from .special import chi2_sf

__all__ = [
    "residuals",
    "acf",
    "pacf",
    "box_pierce",
    "ljung_box",
    "arch_lm",
    "portmanteau",
    "goodness",
    "TestResult",
]


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    dof: int


def residuals(fit_result, data, kind="standardized"):
    """Standardised ordinary residuals of a fitted model, length ``N - m``.

    ``kind="standardized"`` divides ``y*[n] - mu[n]`` by the standard
    deviation of ``y[n]`` (count scale), as the residual is usually
    written for this model; ``kind="count"`` uses ``y[n] - K mu[n]`` in the
    numerator so both sides are on the count scale. The two differ by the
    constant factor ``K``, so every scale-free diagnostic agrees.
    """
    spec = fit_result.spec
    m, K = spec.m, spec.K
    prec = fit_result.params_hat.precision
    mu = filter_signal(spec, fit_result.params_hat, data, order=0).mu[m:]
    sd = np.sqrt(K * mu * (1.0 - mu) * (K + prec) / (1.0 + prec))
    if kind == "standardized":
        return (data.ystar[m:] - mu) / sd
    if kind == "count":
        return (data.y[m:] - K * mu) / sd
    raise ValueError(f"unknown residual kind {kind!r}")


def acf(series, max_lag, denominator="truncated"):
    """Sample autocorrelations at lags ``0..max_lag``.

    Parameters
    ----------
    series : array-like
    max_lag : int
    denominator : {"truncated", "full"}
        With ``"truncated"`` the lag-``k`` cross products and the squared
        deviations in the denominator run over the same ``M - k`` leading
        positions. ``"full"`` divides by the sum over all ``M`` positions,
        the estimator the Ljung-Box small-sample factor is built for.
        Both centre on the full-sample mean.
    """
    if denominator not in ("truncated", "full"):
        raise ValueError(f"denominator must be 'truncated' or 'full', got {denominator!r}")
    x = np.asarray(series, dtype=float)
    M = x.size
    if not 0 <= max_lag < M:
        raise DiagnosticError(f"need 0 <= max_lag < series length ({M}), got {max_lag}")
    d = x - x.mean()
    sq = d * d
    full = denominator == "full"
    out = np.empty(max_lag + 1)
    for k in range(max_lag + 1):
        den = sq.sum() if full else sq[:M - k].sum()
        if den <= 0:
            raise DiagnosticError("autocorrelation undefined for a zero-variance series")
        out[k] = (d[:M - k] * d[k:]).sum() / den
    out[0] = 1.0
    return out


def pacf(series, max_lag):
    """Partial autocorrelations via the Durbin-Levinson recursion."""
    rho = acf(series, max_lag)
    out = np.zeros(max_lag + 1)
    out[0] = 1.0
    prev = np.zeros(0)
    for k in range(1, max_lag + 1):
        num = rho[k] - prev @ rho[k - 1:0:-1]
        den = 1.0 - prev @ rho[1:k]
        a_kk = num / den
        prev = np.append(prev - a_kk * prev[::-1], a_kk)
        out[k] = a_kk
    return out


def _dof(lags, fitted_params):
    dof = lags - fitted_params
    if dof < 1:
        raise DiagnosticError(f"lags ({lags}) must exceed the number of fitted ARMA parameters ({fitted_params})")
    return dof


def box_pierce(rho, n, lags, fitted_params=0):
    """``Q = n * sum_{k=1}^{lags} rho_k^2`` from precomputed autocorrelations."""
    dof = _dof(lags, fitted_params)
    q = n * float(np.sum(np.asarray(rho)[1:lags + 1] ** 2))
    return TestResult(q, float(chi2_sf(q, dof)), dof)


def ljung_box(rho, n, lags, fitted_params=0):
    """``Q = n (n + 2) sum_k rho_k^2 / (n - k)`` from precomputed autocorrelations."""
    dof = _dof(lags, fitted_params)
    k = np.arange(1, lags + 1)
    q = n * (n + 2) * float(np.sum(np.asarray(rho)[1:lags + 1] ** 2 / (n - k)))
    return TestResult(q, float(chi2_sf(q, dof)), dof)


def arch_lm(series, lags):
    """Engle's LM test: ``T R^2`` from regressing ``e^2`` on a constant and ``lags`` lags."""
    e2 = np.asarray(series, dtype=float) ** 2
    T = e2.size - lags
    if lags < 1 or T <= lags + 1:
        raise DiagnosticError(f"series of length {e2.size} too short for an LM test with {lags} lags")
    Z = np.column_stack([np.ones(T)] + [e2[lags - j:e2.size - j] for j in range(1, lags + 1)])
    target = e2[lags:]
    coef, *_ = np.linalg.lstsq(Z, target, rcond=None)
    fitted = Z @ coef
    tss = np.sum((target - target.mean()) ** 2)
    if tss <= 0:
        raise DiagnosticError("LM test undefined for constant squared residuals")
    r2 = 1.0 - np.sum((target - fitted) ** 2) / tss
    stat = T * r2
    return TestResult(stat, float(chi2_sf(stat, lags)), lags)


def portmanteau(resid, lags=20, fitted_params=0):
    """Box-Pierce, Ljung-Box and ARCH-LM tests on a residual series.

    Parameters
    ----------
    resid : array-like
    lags : int
    fitted_params : int
        Number of ARMA coefficients (``p + q``) subtracted from the
        portmanteau degrees of freedom. The LM test always uses ``lags``.

    The portmanteau statistics use the full-denominator autocorrelations;
    the truncated form makes Ljung-Box reject white noise too often.

    Returns
    -------
    dict
        ``{"box_pierce": TestResult, "ljung_box": TestResult, "lm_arch": TestResult}``
    """
    x = np.asarray(resid, dtype=float)
    if x.size <= lags + 1:
        raise DiagnosticError(f"residual series of length {x.size} too short for {lags} lags")
    rho = acf(x, lags, denominator="full")
    return {
        "box_pierce": box_pierce(rho, x.size, lags, fitted_params),
        "ljung_box": ljung_box(rho, x.size, lags, fitted_params),
        "lm_arch": arch_lm(x, lags),
    }


def goodness(actual, predicted, training):
    """Forecast accuracy ``(RMSE, MdAE, MASE)``.

    MASE scales the forecast MAE by the in-sample MAE of the lag-1 naive
    forecast on ``training``.
    """
    a = np.asarray(actual, dtype=float)
    f = np.asarray(predicted, dtype=float)
    if a.shape != f.shape:
        raise ValueError("actual and predicted must have equal length")
    err = a - f
    rmse = float(np.sqrt(np.mean(err**2)))
    mdae = float(np.median(np.abs(err)))
    scale = np.mean(np.abs(np.diff(np.asarray(training, dtype=float))))
    if not scale > 0:
        raise DiagnosticError("MASE undefined: training series is constant")
    return rmse, mdae, float(np.mean(np.abs(err)) / scale)
