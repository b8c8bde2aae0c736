"""scikit-learn style estimators wrapping the functional API.

``fit(y, X=None)`` takes the count series and optional covariates and
``predict(n_periods, X=None)`` returns out-of-sample forecasts, in the style
of time-series forecasters built on the scikit-learn base classes.
"""
import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from .baselines import arma_fit, arma_forecast, holt_winters_fit
from .core import ModelSpec, SignalData, log_likelihood
from .diagnostics import portmanteau, residuals
from .estimate import FitOptions, confidence_interval, fit
from .forecast import forecast
from .inference import wald_test

__all__ = ["BBARMA", "ARMAForecaster", "HoltWintersForecaster"]


def _check_xy(y, X):
    y = column_or_1d(check_array(np.asarray(y).reshape(-1, 1), ensure_2d=True,
                                 dtype=None, ensure_all_finite=True))
    if X is not None:
        X = check_array(X, ensure_2d=False, dtype=float)
        X = X.reshape(y.size, -1)
    return y, X


class BBARMA(RegressorMixin, BaseEstimator):
    """Beta-binomial ARMA model for counts on ``{0..K}``.

    Parameters
    ----------
    p, q : int
        Autoregressive and moving-average orders on the link scale.
    K : int
        Number of trials; observations must lie in ``0..K``.
    link : {"logit", "probit", "cloglog"}
    max_iter : int
    grad_tol : float, optional
        Absolute gradient tolerance; by default ``1e-6 (1 + |loglik|)``.

    Attributes
    ----------
    result_ : FitResult
    data_ : SignalData
    params_ : ParamVector
    """

    def __init__(self, p=1, q=0, K=255, link="logit", max_iter=500, grad_tol=None):
        self.p = p
        self.q = q
        self.K = K
        self.link = link
        self.max_iter = max_iter
        self.grad_tol = grad_tol

    def _spec(self, n_cov):
        return ModelSpec(p=self.p, q=self.q, n_covariates=n_cov, K=self.K, link=self.link)

    def fit(self, y, X=None):
        y, X = _check_xy(y, X)
        self.data_ = SignalData(y, self.K, X)
        spec = self._spec(self.data_.n_covariates)
        self.result_ = fit(spec, self.data_, FitOptions(max_iters=self.max_iter, grad_tol=self.grad_tol))
        self.params_ = self.result_.params_hat
        self.n_features_in_ = self.data_.n_covariates
        return self

    def predict(self, n_periods=1, X=None):
        """Forecast the next ``n_periods`` counts (rounded ``K mu``)."""
        return self.forecast(n_periods, X).y_hat

    def forecast(self, n_periods=1, X=None):
        check_is_fitted(self, "result_")
        if X is not None:
            X = check_array(X, ensure_2d=False, dtype=float).reshape(n_periods, -1)
        return forecast(self.result_, self.data_, n_periods, X)

    def score(self, y, X=None):
        """Mean conditional log-likelihood per observation of a new series under the fitted parameters."""
        check_is_fitted(self, "result_")
        y, X = _check_xy(y, X)
        data = SignalData(y, self.K, X)
        return log_likelihood(self.result_.spec, self.params_, data) / max(1, data.N - self.result_.spec.m)

    def residuals(self, kind="standardized"):
        check_is_fitted(self, "result_")
        return residuals(self.result_, self.data_, kind)

    def diagnose(self, lags=20):
        return portmanteau(self.residuals(), lags, self.p + self.q)

    def conf_int(self, alpha=0.05):
        check_is_fitted(self, "result_")
        return confidence_interval(self.result_, alpha)

    def wald_test(self, interest_idx, null_values=None, pfa=0.05):
        check_is_fitted(self, "result_")
        return wald_test(self.result_, interest_idx, null_values, pfa)

    def summary(self):
        check_is_fitted(self, "result_")
        return self.result_.summary()


class ARMAForecaster(RegressorMixin, BaseEstimator):
    """Gaussian ARMA(p, q) with covariates, fitted by conditional least squares."""

    def __init__(self, p=1, q=0):
        self.p = p
        self.q = q

    def fit(self, y, X=None):
        y, X = _check_xy(y, X)
        self.y_ = y.astype(float)
        self.result_ = arma_fit(self.y_, X, self.p, self.q)
        self.n_features_in_ = 0 if X is None else X.shape[1]
        return self

    def predict(self, n_periods=1, X=None):
        check_is_fitted(self, "result_")
        return arma_forecast(self.result_, self.y_, n_periods, X)


class HoltWintersForecaster(RegressorMixin, BaseEstimator):
    """Additive Holt-Winters with grid-searched smoothing constants."""

    def __init__(self, period=12, grid_step=0.05):
        self.period = period
        self.grid_step = grid_step

    def fit(self, y, X=None):
        y, _ = _check_xy(y, None)
        self.result_ = holt_winters_fit(y.astype(float), self.period, self.grid_step)
        return self

    def predict(self, n_periods=1, X=None):
        check_is_fitted(self, "result_")
        return self.result_.forecast(n_periods)
