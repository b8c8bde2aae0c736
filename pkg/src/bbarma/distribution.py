"""Beta-binomial distribution in the mean/precision parameterisation.

With ``a = mu * phi`` and ``b = (1 - mu) * phi``, ``Y ~ BetaBinomial(K, a, b)``
has ``E(Y) = mu K`` and ``Var(Y) = mu (1 - mu) K (K + phi) / (1 + phi)``.
"""
from dataclasses import dataclass

import numpy as np

from ._kernels import log_pf
from .exceptions import DomainError

__all__ = ["BetaBinomial"]


@dataclass(frozen=True)
class BetaBinomial:
    """Beta-binomial law on ``{0, ..., K}``.

    Parameters
    ----------
    mu : float
        Mean of ``Y / K``, in the open unit interval.
    phi : float
        Precision; larger values concentrate mass around ``mu K``.
    K : int
        Maximum attainable value.
    """

    mu: float
    phi: float
    K: int

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise DomainError(f"mu must lie in (0, 1), got {self.mu}")
        if not self.phi > 0.0:
            raise DomainError(f"phi must be positive, got {self.phi}")
        if int(self.K) != self.K or self.K < 1:
            raise DomainError(f"K must be a positive integer, got {self.K}")
        object.__setattr__(self, "K", int(self.K))

    @classmethod
    def from_shapes(cls, a, b, K):
        return cls(a / (a + b), a + b, K)

    @property
    def a(self):
        return self.mu * self.phi

    @property
    def b(self):
        return (1.0 - self.mu) * self.phi

    def log_pf(self, y):
        """Log probability of ``y`` (scalar or array)."""
        y_arr = np.asarray(y)
        if not np.all((y_arr >= 0) & (y_arr <= self.K) & (np.floor(y_arr) == y_arr)):
            raise DomainError(f"y must be an integer in [0, {self.K}]")
        flat = np.ascontiguousarray(y_arr, dtype=float).reshape(-1)
        out = log_pf(flat, float(self.K), np.full(flat.size, float(self.mu)), float(self.phi))
        return float(out[0]) if np.ndim(y) == 0 else out.reshape(y_arr.shape)

    def pf(self, y):
        return np.exp(self.log_pf(y))

    def moments(self):
        """Return ``(mean, variance)`` of ``Y``."""
        mean = self.mu * self.K
        var = (self.mu - self.mu**2) * self.K * (self.K + self.phi) / (1.0 + self.phi)
        return mean, var

    def sample(self, rng, size=None):
        """Draw ``p ~ Beta(a, b)`` then ``Y ~ Binomial(K, p)``.

        Parameters
        ----------
        rng : numpy.random.Generator
        size : int or tuple, optional
        """
        p = rng.beta(self.a, self.b, size=size)
        return rng.binomial(self.K, p)
