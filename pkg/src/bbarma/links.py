"""Link functions mapping a mean in (0, 1) to the linear predictor.

Each link is exposed two ways: as a :class:`Link` object with numpy methods
for user code, and as an integer code understood by the compiled kernels,
which evaluate the inverse link and its first two derivatives in terms of
the predictor ``eta`` (``dmu/deta = 1/g'(mu)``).
"""
import math

import numpy as np
from numba import njit
from scipy import special as _sp

from .exceptions import DomainError

__all__ = ["Link", "get_link", "LINKS", "MU_EPS"]

MU_EPS = 1e-12

LOGIT, PROBIT, CLOGLOG = 0, 1, 2
_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@njit(cache=True)
def _clamp(mu):
    if mu < MU_EPS:
        return MU_EPS
    if mu > 1.0 - MU_EPS:
        return 1.0 - MU_EPS
    return mu


@njit(cache=True)
def inverse_with_derivatives(code, eta):
    """Return ``(mu, dmu/deta, d2mu/deta2)`` for one predictor value."""
    if code == LOGIT:
        if eta >= 0:
            e = math.exp(-eta)
            mu = 1.0 / (1.0 + e)
        else:
            e = math.exp(eta)
            mu = e / (1.0 + e)
        d1 = mu * (1.0 - mu)
        d2 = d1 * (1.0 - 2.0 * mu)
    elif code == PROBIT:
        mu = 0.5 * math.erfc(-eta / _SQRT2)
        d1 = _INV_SQRT_2PI * math.exp(-0.5 * eta * eta)
        d2 = -eta * d1
    else:
        ee = math.exp(eta) if eta < 700.0 else math.inf
        mu = -math.expm1(-ee)
        d1 = ee * math.exp(-ee) if ee < math.inf else 0.0
        d2 = d1 * (1.0 - ee) if ee < math.inf else 0.0
    return _clamp(mu), d1, d2


class Link:
    """A twice-differentiable, strictly increasing map ``g: (0, 1) -> R``.

    Parameters
    ----------
    name : {"logit", "probit", "cloglog"}
    """

    _codes = {"logit": LOGIT, "probit": PROBIT, "cloglog": CLOGLOG}

    def __init__(self, name="logit"):
        if name not in self._codes:
            raise ValueError(f"unknown link {name!r}; choose from {sorted(self._codes)}")
        self.name = name
        self.code = self._codes[name]

    def __repr__(self):
        return f"Link({self.name!r})"

    def __eq__(self, other):
        return isinstance(other, Link) and other.name == self.name

    def __hash__(self):
        return hash(self.name)

    @staticmethod
    def _mu(mu):
        arr = np.asarray(mu, dtype=float)
        if not np.all((arr > 0) & (arr < 1)):
            raise DomainError("link functions require 0 < mu < 1")
        return arr

    def __call__(self, mu):
        return self.link(mu)

    def link(self, mu):
        m = self._mu(mu)
        if self.code == LOGIT:
            out = np.log(m) - np.log1p(-m)
        elif self.code == PROBIT:
            out = _sp.ndtri(m)
        else:
            out = np.log(-np.log1p(-m))
        return _scalar(out, mu)

    def inverse(self, eta):
        """Inverse link, clamped to ``[MU_EPS, 1 - MU_EPS]``."""
        e = np.asarray(eta, dtype=float)
        if self.code == LOGIT:
            out = _sp.expit(e)
        elif self.code == PROBIT:
            out = _sp.ndtr(e)
        else:
            out = -np.expm1(-np.exp(np.minimum(e, 700.0)))
        return _scalar(np.clip(out, MU_EPS, 1.0 - MU_EPS), eta)

    def deriv(self, mu):
        """First derivative ``g'(mu)``."""
        m = self._mu(mu)
        if self.code == LOGIT:
            out = 1.0 / (m * (1.0 - m))
        elif self.code == PROBIT:
            z = _sp.ndtri(m)
            out = 1.0 / (_INV_SQRT_2PI * np.exp(-0.5 * z * z))
        else:
            L = -np.log1p(-m)
            out = 1.0 / ((1.0 - m) * L)
        return _scalar(out, mu)

    def deriv2(self, mu):
        """Second derivative ``g''(mu)``."""
        m = self._mu(mu)
        if self.code == LOGIT:
            out = (2.0 * m - 1.0) / (m * (1.0 - m)) ** 2
        elif self.code == PROBIT:
            z = _sp.ndtri(m)
            pdf = _INV_SQRT_2PI * np.exp(-0.5 * z * z)
            out = z / pdf**2
        else:
            L = -np.log1p(-m)
            out = (L - 1.0) / ((1.0 - m) * L) ** 2
        return _scalar(out, mu)

    def mu_eta(self, eta):
        """``dmu/deta`` evaluated at the predictor."""
        e = np.asarray(eta, dtype=float)
        out = np.array([inverse_with_derivatives(self.code, v)[1] for v in e.ravel()])
        return _scalar(out.reshape(e.shape), eta)


def _scalar(out, like):
    return float(out) if np.ndim(like) == 0 else out


LINKS = {name: Link(name) for name in Link._codes}


def get_link(link):
    """Coerce a name or :class:`Link` into a :class:`Link`."""
    if isinstance(link, Link):
        return link
    return Link(link)
