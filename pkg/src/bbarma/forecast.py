"""Out-of-signal forecasting from a fitted BBARMA model."""
from dataclasses import dataclass

import numpy as np

from .core import filter_signal
from .exceptions import BBARMAError

__all__ = ["Forecast", "forecast", "round_half_away"]


class ForecastError(BBARMAError, ValueError):
    """Forecast inputs are incomplete."""


@dataclass(frozen=True)
class Forecast:
    mu_hat: np.ndarray
    y_hat: np.ndarray

    @property
    def horizon(self):
        return self.mu_hat.size


def round_half_away(x):
    x = np.asarray(x, dtype=float)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def forecast(fit_result, data, H, future_X=None):
    """Forecast ``mu[N+1..N+H]`` and the matching integer levels.

    Unknown future values of ``y*`` are replaced by their own forecasts and
    unknown future MA errors by zero.

    Parameters
    ----------
    fit_result : FitResult
    data : SignalData
        The in-sample signal the model was fitted to (or an extension of it).
    H : int
    future_X : array-like, shape (H, l), optional
        Required when the model has covariates.
    """
    spec = fit_result.spec
    params = fit_result.params_hat
    H = int(H)
    if H < 1:
        raise ValueError("forecast horizon must be positive")
    l = spec.n_covariates
    if l:
        if future_X is None:
            raise ForecastError(f"model has {l} covariates: future_X with {H} rows is required")
        Xf = np.asarray(future_X, dtype=float)
        if Xf.ndim == 1 and l == 1:
            Xf = Xf[:, None]
        if Xf.shape != (H, l):
            raise ForecastError(f"future_X must have shape ({H}, {l}), got {Xf.shape}")
    else:
        Xf = np.zeros((H, 0))

    state = filter_signal(spec, params, data, order=0)
    N = data.N
    ystar = np.concatenate([data.ystar, np.zeros(H)])
    resid = np.concatenate([state.resid_ma, np.zeros(H)])
    mu_hat = np.empty(H)
    for h in range(H):
        t = N + h
        eta = params.zeta + Xf[h] @ params.beta
        for i, phi_i in enumerate(params.phi, start=1):
            eta += phi_i * ystar[t - i]
        for j, theta_j in enumerate(params.theta, start=1):
            eta += theta_j * resid[t - j]
        mu_hat[h] = spec.link.inverse(eta)
        ystar[t] = mu_hat[h]
    return Forecast(mu_hat, round_half_away(mu_hat * spec.K))
