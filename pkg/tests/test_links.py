import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bbarma import Link, get_link
from bbarma.exceptions import DomainError
from bbarma.links import MU_EPS, inverse_with_derivatives

KINDS = ["logit", "probit", "cloglog"]
MUS = [0.1, 0.3, 0.5, 0.7, 0.9]


def test_zero_points():
    assert Link("logit")(0.5) == 0.0
    assert Link("probit")(0.5) == pytest.approx(0.0, abs=1e-15)
    assert Link("cloglog")(1 - math.exp(-1)) == pytest.approx(0.0, abs=1e-15)
    assert Link("logit").inverse(0.0) == 0.5


def test_logit_derivatives():
    g = Link("logit")
    assert g.deriv(0.5) == pytest.approx(4.0)
    assert g.deriv2(0.5) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("kind", KINDS)
def test_inverse_round_trip(kind):
    g = Link(kind)
    mu = np.linspace(0.01, 0.99, 99)
    np.testing.assert_allclose(g.inverse(g.link(mu)), mu, atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_saturation(kind):
    g = Link(kind)
    lo, hi = g.inverse(np.array([-40.0, 40.0]))
    assert lo >= MU_EPS and hi <= 1 - MU_EPS
    assert np.all(np.isfinite(g.inverse(np.array([-1e4, 1e4]))))


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("mu", MUS)
def test_derivatives_against_finite_differences(kind, mu):
    g = Link(kind)
    h = 1e-6
    assert g.deriv(mu) == pytest.approx((g(mu + h) - g(mu - h)) / (2 * h), rel=1e-6)
    assert g.deriv2(mu) == pytest.approx((g.deriv(mu + h) - g.deriv(mu - h)) / (2 * h), rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("eta", [-3.0, -0.4, 0.0, 0.8, 2.5])
def test_kernel_inverse_derivatives(kind, eta):
    g = Link(kind)
    mu, d1, d2 = inverse_with_derivatives(g.code, eta)
    h = 1e-5
    assert mu == pytest.approx(g.inverse(eta), abs=1e-15)
    assert d1 == pytest.approx((g.inverse(eta + h) - g.inverse(eta - h)) / (2 * h), rel=1e-6)
    assert d1 == pytest.approx(1.0 / g.deriv(mu), rel=1e-10)
    fd2 = (inverse_with_derivatives(g.code, eta + h)[1] - inverse_with_derivatives(g.code, eta - h)[1]) / (2 * h)
    assert d2 == pytest.approx(fd2, rel=1e-5, abs=1e-9)
    # d2mu/deta2 = -g''/g'^3
    assert d2 == pytest.approx(-g.deriv2(mu) / g.deriv(mu) ** 3, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_mu_eta_vectorised(kind):
    g = Link(kind)
    eta = np.array([-1.0, 0.0, 1.5])
    np.testing.assert_allclose(g.mu_eta(eta), 1.0 / g.deriv(g.inverse(eta)), rtol=1e-10)


@pytest.mark.parametrize("kind", KINDS)
@given(a=st.floats(1e-6, 1 - 1e-6), b=st.floats(1e-6, 1 - 1e-6))
def test_strictly_increasing(kind, a, b):
    if a == b:
        return
    g = Link(kind)
    lo, hi = min(a, b), max(a, b)
    assert g(lo) < g(hi)


def test_domain_and_names():
    with pytest.raises(DomainError):
        Link("logit")(1.0)
    with pytest.raises(ValueError):
        Link("cauchit")
    assert get_link("probit") == Link("probit")
    assert get_link(Link("logit")) is not None
    assert len({Link("logit"), Link("logit")}) == 1
