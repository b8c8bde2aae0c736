import math

import numpy as np
import pytest

from bbarma import (
    FitOptions,
    ModelSpec,
    ParamVector,
    SignalData,
    confidence_interval,
    fit,
    log_likelihood,
    ols_init,
    select_order,
    simulate,
)
from bbarma.estimate import information_criteria
from bbarma.exceptions import FitError, InitializationError
from bbarma.montecarlo import _children


def test_ols_init_simple_regression_oracle(scenario1):
    spec, params = scenario1
    data = simulate(spec, params, 300, seed=4)
    x, y = data.ystar[:-1], data.ystar[1:]
    slope = np.sum((x - x.mean()) * (y - y.mean())) / np.sum((x - x.mean()) ** 2)
    start = ols_init(spec, data)
    assert start.phi[0] == pytest.approx(slope, rel=1e-10)
    assert start.zeta == pytest.approx(y.mean() - slope * x.mean(), rel=1e-10)
    assert start.precision == 1.0


def test_ols_init_ma_starts_at_zero(scenario2):
    spec, params = scenario2
    start = ols_init(spec, simulate(spec, params, 200, seed=1))
    np.testing.assert_array_equal(start.theta, 0.0)
    assert start.precision == 1.0


def test_ols_init_names_collinear_columns():
    data = SignalData(np.arange(50) % 7, 10, np.ones((50, 1)))
    with pytest.raises(InitializationError, match="x1|intercept"):
        ols_init(ModelSpec(1, 0, n_covariates=1, K=10), data)
    # a constant signal makes the lag collinear with the intercept
    with pytest.raises(InitializationError, match="ylag1|intercept"):
        ols_init(ModelSpec(1, 0, K=10), SignalData(np.full(40, 4), 10))


def test_fit_scenario1(scenario1):
    spec, params = scenario1
    data = simulate(spec, params, 500, seed=10)
    res = fit(spec, data)
    assert res.converged
    assert res.grad_norm <= 1e-5 * (1 + abs(res.loglik))
    assert res.loglik >= log_likelihood(spec, params, data)
    assert res.loglik == pytest.approx(log_likelihood(spec, res.params_hat, data), rel=1e-12)
    assert np.all(res.std_err > 0)
    np.testing.assert_allclose(res.std_err, np.sqrt(np.diag(np.linalg.inv(res.info_matrix))), rtol=1e-8)
    assert np.all(np.abs(res.gamma - params.to_array()) < 5 * res.std_err)
    r = spec.dim
    assert res.n_obs == 499
    assert res.aic == pytest.approx(-2 * res.loglik + 2 * r)
    assert res.sic == pytest.approx(-2 * res.loglik + r * math.log(499))
    assert res.hq == pytest.approx(-2 * res.loglik + 2 * r * math.log(math.log(499)))
    names = [row[0] for row in res.summary()]
    assert names == spec.param_names()


def test_refit_is_stationary(scenario2):
    spec, params = scenario2
    data = simulate(spec, params, 500, seed=3)
    res = fit(spec, data)
    again = fit(spec, data, start=res.params_hat)
    assert np.max(np.abs(again.gamma - res.gamma)) <= 1e-6
    assert again.loglik >= res.loglik - 1e-9


def test_never_worse_than_truth(scenario2):
    spec, params = scenario2
    for seed in range(10):
        data = simulate(spec, params, 200, seed=seed)
        res = fit(spec, data)
        assert res.loglik >= log_likelihood(spec, params, data) - 1e-8


def test_convergence_rate_scenario1(scenario1):
    spec, params = scenario1
    ok = 0
    for child in _children(77, 100):
        res = fit(spec, simulate(spec, params, 500, child))
        ok += res.converged and res.n_iters < 200
    assert ok >= 99


def test_iteration_budget_reported(scenario2):
    spec, params = scenario2
    data = simulate(spec, params, 300, seed=2)
    res = fit(spec, data, FitOptions(max_iters=1))
    assert not res.converged
    assert res.n_iters == 1


def test_too_short_signal():
    with pytest.raises(FitError):
        fit(ModelSpec(1, 1, K=10), SignalData([1, 2, 3, 4, 5], 10))


def test_mismatched_data(scenario1):
    spec, params = scenario1
    with pytest.raises(ValueError):
        fit(ModelSpec(1, 0, K=10), simulate(spec, params, 100, seed=1))


def test_confidence_interval(scenario1):
    spec, params = scenario1
    res = fit(spec, simulate(spec, params, 300, seed=6))
    ci = confidence_interval(res, 0.10)
    np.testing.assert_allclose((ci[:, 1] - ci[:, 0]) / 2, 1.6448536269514722 * res.std_err, rtol=1e-12)
    np.testing.assert_allclose(ci.mean(axis=1), res.gamma, rtol=1e-12)
    res.std_err = np.zeros_like(res.std_err)
    ci = confidence_interval(res, 0.10)
    np.testing.assert_array_equal(ci[:, 0], ci[:, 1])
    res.std_err = None
    with pytest.raises(FitError):
        confidence_interval(res)


def test_information_criteria_values():
    assert information_criteria(-10.0, 3, 100) == pytest.approx(
        (26.0, 20 + 3 * math.log(100), 20 + 6 * math.log(math.log(100))))


def test_select_order_uses_common_window():
    spec = ModelSpec(2, 0)
    params = ParamVector(0.0, [], [2.0, -1.5], [], 50.0)
    hits = 0
    for child in _children(5, 20):
        data = simulate(spec, params, 400, child)
        best, table = select_order(data, criterion="sic")
        hits += best == (2, 0)
    assert hits >= 16
    assert set(table) == {(p, q) for p in range(3) for q in range(3)}


def test_select_order_windows_equal(scenario1):
    spec, params = scenario1
    data = simulate(spec, params, 200, seed=1)
    best, table = select_order(data, max_p=2, max_q=1, criterion="aic")
    # the AIC of (p, 0) is reproduced by fitting on the trimmed signal
    sub = SignalData(data.y[1:], 255)
    assert table[(1, 0)] == pytest.approx(fit(ModelSpec(1, 0), sub).aic, rel=1e-10)
    with pytest.raises(ValueError):
        select_order(data, criterion="bic")


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="theta1 is weakly identified in this design; see the decisions ledger")
def test_order_selection_recovers_arma11(scenario2):
    spec, params = scenario2
    hits = 0
    for child in _children(99, 200):
        best, _ = select_order(simulate(spec, params, 500, child), criterion="aic")
        hits += best == (1, 1)
    assert hits >= 160
