import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from bbarma import BetaBinomial
from bbarma.exceptions import DomainError
from oracles import brute_moments

GRID = [(mu, phi, K) for mu in (0.1, 0.5, 0.9) for phi in (1.0, 15.0, 100.0) for K in (1, 25, 255)]


def test_uniform_case():
    assert BetaBinomial(0.5, 2.0, 2).log_pf(0) == pytest.approx(math.log(1 / 3), abs=1e-14)


@pytest.mark.parametrize("mu,phi,K", GRID)
def test_normalisation_and_moments(mu, phi, K):
    d = BetaBinomial(mu, phi, K)
    pf = d.pf(np.arange(K + 1))
    assert abs(pf.sum() - 1.0) <= 1e-10
    mean, var = brute_moments(pf, K)
    m_ref, v_ref = d.moments()
    assert mean == pytest.approx(m_ref, rel=1e-8)
    assert var == pytest.approx(v_ref, rel=1e-8)


@pytest.mark.parametrize("mu,phi,K", [(0.3, 4.0, 25), (0.9, 20.0, 255), (0.05, 0.7, 10)])
def test_matches_scipy(mu, phi, K):
    y = np.arange(K + 1)
    ref = stats.betabinom.logpmf(y, K, mu * phi, (1 - mu) * phi)
    np.testing.assert_allclose(BetaBinomial(mu, phi, K).log_pf(y), ref, rtol=1e-11, atol=1e-11)


def test_moment_examples():
    d = BetaBinomial(0.5, 15.0, 255)
    assert d.moments() == pytest.approx((127.5, 1075.78125))
    wide = BetaBinomial(0.3, 1e6, 255)
    assert wide.moments()[1] / (255 * 0.3 * 0.7) == pytest.approx(1.0, rel=0.01)


def test_normalised_at_huge_precision():
    pf = BetaBinomial(0.3, 1e40, 255).pf(np.arange(256))
    ref = stats.binom.pmf(np.arange(256), 255, 0.3)
    np.testing.assert_allclose(pf, ref, rtol=1e-9, atol=1e-300)


def test_normalised_at_tiny_precision():
    pf = BetaBinomial(0.5, 1e-3, 31).pf(np.arange(32))
    assert pf.sum() == pytest.approx(1.0, abs=1e-10)
    assert pf[0] > 0.49 and pf[-1] > 0.49


@given(st.floats(0.01, 0.99), st.floats(0.1, 500), st.integers(1, 300), st.data())
def test_reflection_symmetry(mu, phi, K, data):
    y = data.draw(st.integers(0, K))
    a = BetaBinomial(mu, phi, K).log_pf(y)
    b = BetaBinomial(1 - mu, phi, K).log_pf(K - y)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-10)


@given(st.floats(0.01, 0.99), st.floats(0.1, 500), st.integers(1, 300))
def test_pf_is_probability(mu, phi, K):
    pf = BetaBinomial(mu, phi, K).pf(np.arange(K + 1))
    assert np.all(pf >= 0) and np.all(pf <= 1)
    assert pf.sum() == pytest.approx(1.0, abs=1e-9)


def test_shapes():
    # increasing on a suffix of the support
    pf = BetaBinomial(0.9, 4.0, 25).pf(np.arange(26))
    assert int(np.argmax(pf)) == 25
    assert np.all(np.diff(pf[20:]) > 0)
    # unimodal at the centre
    pf = BetaBinomial(0.5, 100.0, 25).pf(np.arange(26))
    assert int(np.argmax(pf)) in (12, 13)
    pf = BetaBinomial(0.5, 100.0, 24).pf(np.arange(25))
    assert int(np.argmax(pf)) == 12
    # U shape when a, b < 1
    pf = BetaBinomial(0.5, 1.0, 25).pf(np.arange(26))
    assert pf[0] > pf[12] < pf[25]


def test_from_shapes():
    d = BetaBinomial.from_shapes(2.0, 6.0, 10)
    assert d.mu == pytest.approx(0.25) and d.phi == pytest.approx(8.0)
    assert d.a == pytest.approx(2.0) and d.b == pytest.approx(6.0)


@pytest.mark.parametrize("args", [(0.0, 1.0, 5), (1.0, 1.0, 5), (0.5, 0.0, 5), (0.5, -1.0, 5), (0.5, 1.0, 0)])
def test_invalid_parameters(args):
    with pytest.raises(DomainError):
        BetaBinomial(*args)


@pytest.mark.parametrize("y", [-1, 26, 2.5])
def test_invalid_outcome(y):
    with pytest.raises(DomainError):
        BetaBinomial(0.5, 1.0, 25).log_pf(y)


def test_sample_mean():
    d = BetaBinomial(0.9, 20.0, 255)
    x = d.sample(np.random.default_rng(1), 100_000)
    mean, var = d.moments()
    assert abs(x.mean() - mean) <= 3 * math.sqrt(var / x.size)
    assert x.min() >= 0 and x.max() <= 255


def test_sample_goodness_of_fit():
    d = BetaBinomial(0.5, 4.0, 25)
    x = d.sample(np.random.default_rng(7), 100_000)
    observed = np.bincount(x, minlength=26)
    expected = d.pf(np.arange(26)) * x.size
    assert stats.chisquare(observed, expected).pvalue > 0.01


def test_sample_deterministic():
    d = BetaBinomial(0.3, 5.0, 40)
    a = d.sample(np.random.default_rng(3), 50)
    b = d.sample(np.random.default_rng(3), 50)
    np.testing.assert_array_equal(a, b)
