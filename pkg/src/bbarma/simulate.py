"""Draw synthetic signals from a BBARMA model."""
import numpy as np

from . import _kernels
from .core import SignalData

__all__ = ["simulate", "cosine_signal", "BURN_IN"]

BURN_IN = 50


def cosine_signal(f0, n):
    """``cos(2 pi f0 n)`` at the given integer time indices."""
    return np.cos(2.0 * np.pi * f0 * np.asarray(n, dtype=float))


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def simulate(spec, params, N, seed=None, X=None, f0=None, burn_in=BURN_IN):
    """Simulate ``N`` observations after ``m + burn_in`` discarded warm-up draws.

    Parameters
    ----------
    spec : ModelSpec
    params : ParamVector
    N : int
    seed : int, SeedSequence or Generator, optional
    X : array-like, shape (N, l), optional
        Covariates for the retained observations; the warm-up uses zeros.
    f0 : float, optional
        Use the single covariate ``s[n] = cos(2 pi f0 n)``, ``n = 1..N``,
        continued to ``n <= 0`` through the warm-up. Mutually exclusive with ``X``.

    Returns
    -------
    SignalData
    """
    params.check(spec)
    if N <= spec.m:
        raise ValueError(f"N={N} must exceed m={spec.m}")
    warm = spec.m + burn_in
    l = spec.n_covariates
    if f0 is not None:
        if X is not None or l != 1:
            raise ValueError("f0 requires a spec with exactly one covariate and no X")
        X_all = cosine_signal(f0, np.arange(1 - warm, N + 1))[:, None]
    elif l:
        if X is None:
            raise ValueError(f"spec has {l} covariates; pass X or f0")
        X = np.asarray(X, dtype=float).reshape(N, l)
        X_all = np.vstack([np.zeros((warm, l)), X])
    else:
        X_all = np.zeros((N + warm, 0))
    y = _kernels.simulate_kernel(_rng(seed), np.ascontiguousarray(X_all), params.zeta,
                                 params.beta, params.phi, params.theta, params.precision,
                                 spec.K, spec.link.code, spec.m)
    return SignalData(y[warm:], spec.K, X_all[warm:])
