"""Wald tests and the BBARMA signal detector."""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .core import ModelSpec, SignalData
from .estimate import FitOptions, fit
from .exceptions import BBARMAError, DetectionError, FitError
from .special import chi2_quantile, chi2_sf

__all__ = ["DetectionReport", "wald_statistic", "wald_test", "detect_signal", "decide"]


@dataclass(frozen=True)
class DetectionReport:
    """Outcome of a Wald test used as a detector.

    ``detected`` is ``wald_stat > threshold``; ``threshold`` is the
    ``1 - pfa`` quantile of chi-squared with ``dof`` degrees of freedom.
    """

    wald_stat: float
    dof: int
    threshold: float
    p_value: float
    detected: bool
    pfa: float = None
    estimate: np.ndarray = None


def threshold_for(pfa, dof):
    """Detection threshold; ``pfa`` of 0 or 1 maps to ``+inf`` / ``0``."""
    if not 0.0 <= pfa <= 1.0:
        raise ValueError(f"pfa must lie in [0, 1], got {pfa}")
    if pfa == 0.0:
        return np.inf
    if pfa == 1.0:
        return 0.0
    return float(chi2_quantile(1.0 - pfa, dof))


def decide(stat, dof, pfa, estimate=None):
    """Turn a Wald statistic into a :class:`DetectionReport` at false-alarm rate ``pfa``."""
    thr = threshold_for(pfa, dof)
    return DetectionReport(float(stat), int(dof), thr, float(chi2_sf(stat, dof)),
                           bool(stat > thr), pfa, estimate)


def wald_statistic(estimate, cov, null_values):
    """Quadratic form ``(est - null)' cov^{-1} (est - null)``.

    Raises
    ------
    DetectionError
        If ``cov`` is singular.
    """
    diff = np.atleast_1d(np.asarray(estimate, dtype=float) - np.asarray(null_values, dtype=float))
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    try:
        c = linalg.cho_factor(cov, lower=True)
    except linalg.LinAlgError as err:
        raise DetectionError("covariance sub-block of the interest parameters is singular") from err
    return max(float(diff @ linalg.cho_solve(c, diff)), 0.0)


def wald_test(fit_result, interest_idx, null_values=None, pfa=0.05):
    """Wald test of ``gamma[interest_idx] == null_values`` on a fitted model.

    Parameters
    ----------
    fit_result : FitResult
        Must be converged with an invertible observed information.
    interest_idx : sequence of int
        Positions in the ``gamma`` layout, see ``ModelSpec.param_names``.
    null_values : array-like, optional
        Defaults to zeros.
    pfa : float
        Probability of false alarm used for the threshold.
    """
    if not fit_result.converged:
        raise FitError("refusing to test an unconverged fit")
    if fit_result.info_inverse is None:
        raise FitError("observed information is singular; no covariance available")
    idx = np.atleast_1d(np.asarray(interest_idx, dtype=int))
    if idx.size == 0 or len(set(idx.tolist())) != idx.size:
        raise ValueError("interest indices must be non-empty and distinct")
    if idx.min() < 0 or idx.max() >= fit_result.spec.dim:
        raise IndexError(f"interest indices out of range for dimension {fit_result.spec.dim}")
    null = np.zeros(idx.size) if null_values is None else np.atleast_1d(null_values)
    if null.size != idx.size:
        raise ValueError("null_values must match interest_idx in length")
    est = fit_result.gamma[idx]
    stat = wald_statistic(est, fit_result.info_inverse[np.ix_(idx, idx)], null)
    return decide(stat, idx.size, pfa, est)


def detect_signal(data, s, spec=None, pfa=0.05, options=None):
    """Detect a known waveform ``s`` in a bounded count signal.

    Fits ``g(mu[n]) = zeta + beta1 s[n] + AR(p) + MA(q)`` and tests
    ``beta1 = 0`` with a one-degree-of-freedom Wald test.

    Parameters
    ----------
    data : SignalData
        Observed signal; any covariates it carries are replaced by ``s``.
    s : array-like of length N
        Candidate waveform.
    spec : ModelSpec, optional
        Must have ``n_covariates == 1``. Defaults to BBARMA(1, 1), logit link.
    pfa : float
    options : FitOptions, optional

    Raises
    ------
    DetectionError
        If the fit fails, does not converge or has no usable covariance.
    """
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.size != data.N:
        raise ValueError("candidate signal and data must have equal length")
    spec = spec or ModelSpec(p=1, q=1, n_covariates=1, K=data.K)
    if spec.n_covariates != 1:
        raise ValueError("the detector model carries exactly one covariate")
    data = SignalData(data.y, data.K, s[:, None])
    try:
        res = fit(spec, data, options or FitOptions())
        return wald_test(res, [1], [0.0], pfa)
    except (BBARMAError, ArithmeticError) as err:
        raise DetectionError(f"BBARMA detector failed: {err}") from err
