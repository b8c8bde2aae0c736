"""Monte Carlo experiments: estimator tables, empirical size and ROC curves.

Every replication draws from its own ``SeedSequence`` child of the master
seed, so results do not depend on the number of workers or on the order
in which replications finish.
"""
import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import arma_detect, gaussian_detect
from .core import ModelSpec, ParamVector, SignalData
from .estimate import FitOptions, confidence_interval, fit
from .exceptions import BBARMAError
from .inference import threshold_for, wald_test
from .simulate import cosine_signal, simulate

__all__ = [
    "ScenarioConfig",
    "SCENARIOS",
    "PFA_GRID",
    "EstimationTable",
    "RocCurve",
    "mc_estimation",
    "detector_statistics",
    "mc_roc",
    "roc_from_statistics",
]

PFA_GRID = (0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
DETECTORS = ("bbarma", "arma", "gaussian")


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation design.

    For detection scenarios ``true_params.beta[0]`` is the signal amplitude
    and ``f0`` the frequency of ``s[n] = cos(2 pi f0 n)``.
    """

    name: str
    spec: ModelSpec
    true_params: ParamVector
    N: int = 500
    replications: int = 1000
    seed: int = 2024
    f0: float = None
    pfa_grid: tuple = PFA_GRID
    alpha: float = 0.10

    def __post_init__(self):
        grid = tuple(float(a) for a in self.pfa_grid)
        if list(grid) != sorted(grid) or grid[0] < 0 or grid[-1] > 1:
            raise ValueError("pfa_grid must be sorted within [0, 1]")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        object.__setattr__(self, "pfa_grid", grid)

    def with_(self, **changes):
        return replace(self, **changes)


def _scenario(name, p, q, zeta, phi, theta, prec, beta=None, f0=None, N=500):
    spec = ModelSpec(p=p, q=q, n_covariates=0 if beta is None else 1, K=255)
    params = ParamVector(zeta, [] if beta is None else [beta], phi, theta, prec)
    return ScenarioConfig(name, spec, params, N=N, f0=f0,
                          replications=5000 if f0 is not None else 1000)


SCENARIOS = {
    "I": _scenario("I", 1, 0, 1.0, [1.0], [], 20.0),
    "II": _scenario("II", 1, 1, 0.2, [0.5], [0.3], 15.0),
    "III": _scenario("III", 1, 1, 0.2, [0.5], [0.3], 15.0, beta=0.5, f0=0.5, N=100),
    "IV": _scenario("IV", 1, 1, 1.0, [2.0], [1.0], 50.0, beta=0.1, f0=0.7, N=100),
}


def _map(func, items, workers):
    if workers is None or workers <= 1:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (8 * workers))))


def _children(seed, n):
    return np.random.SeedSequence(seed).spawn(n)


@dataclass
class EstimationTable:
    """Monte Carlo summary of point and interval estimates, one column per parameter."""

    names: list
    truth: np.ndarray
    mean: np.ndarray
    bias: np.ndarray
    mse: np.ndarray
    coverage: np.ndarray
    n_ok: int
    failures: int
    N: int
    alpha: float
    estimates: np.ndarray = field(repr=False, default=None)

    def rows(self):
        return [("Mean", self.mean), ("Bias", self.bias), ("MSE", self.mse), ("CR", self.coverage)]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["N", "measure"] + list(self.names))
            for label, vals in self.rows():
                w.writerow([self.N, label] + [f"{v:.6f}" for v in vals])

    def to_dict(self):
        return {
            "N": self.N, "alpha": self.alpha, "n_ok": self.n_ok, "failures": self.failures,
            "parameters": list(self.names), "truth": self.truth.tolist(),
            **{label.lower(): vals.tolist() for label, vals in self.rows()},
        }


def _estimation_rep(args):
    config, child = args
    data = simulate(config.spec, config.true_params, config.N, child, f0=config.f0)
    try:
        res = fit(config.spec, data, FitOptions())
    except (BBARMAError, ArithmeticError, np.linalg.LinAlgError):
        return None
    if not res.converged or res.std_err is None:
        return None
    ci = confidence_interval(res, config.alpha)
    truth = config.true_params.to_array()
    return res.gamma, (ci[:, 0] <= truth) & (truth <= ci[:, 1])


def mc_estimation(config, workers=1):
    """Simulate-and-fit ``config.replications`` times and tabulate the CMLE.

    Replications whose fit fails, does not converge, or has a singular
    observed information are counted in ``failures`` and excluded.
    """
    items = [(config, c) for c in _children(config.seed, config.replications)]
    results = _map(_estimation_rep, items, workers)
    ok = [r for r in results if r is not None]
    truth = config.true_params.to_array()
    names = config.spec.param_names()
    if not ok:
        nan = np.full(truth.size, np.nan)
        return EstimationTable(names, truth, nan, nan, nan, nan, 0, len(results), config.N, config.alpha)
    est = np.array([g for g, _ in ok])
    cover = np.array([c for _, c in ok], dtype=float)
    mean = est.mean(axis=0)
    return EstimationTable(names, truth, mean, mean - truth, np.mean((est - truth) ** 2, axis=0),
                           cover.mean(axis=0), len(ok), len(results) - len(ok), config.N,
                           config.alpha, est)


def _bbarma_stat(data, spec):
    res = fit(spec, data, FitOptions())
    return wald_test(res, [1], [0.0]).wald_stat


def _detector_stat(name, data, spec, s):
    try:
        if name == "bbarma":
            return _bbarma_stat(data, spec)
        y = data.y.astype(float)
        if name == "arma":
            return arma_detect(y, s, spec.p, spec.q).wald_stat
        if name == "gaussian":
            return gaussian_detect(y, s).wald_stat
    except (BBARMAError, ArithmeticError, np.linalg.LinAlgError):
        return math.nan
    raise ValueError(f"unknown detector {name!r}")


def _roc_rep(args):
    config, detectors, child = args
    seed_h1, seed_h0 = child.spawn(2)
    s = cosine_signal(config.f0, np.arange(1, config.N + 1))
    h0_params = replace(config.true_params, beta=np.zeros(1))
    data1 = simulate(config.spec, config.true_params, config.N, seed_h1, f0=config.f0)
    data0 = simulate(config.spec, h0_params, config.N, seed_h0, f0=config.f0)
    return ([_detector_stat(d, data1, config.spec, s) for d in detectors],
            [_detector_stat(d, data0, config.spec, s) for d in detectors])


def detector_statistics(config, detectors=DETECTORS, workers=1):
    """Wald statistics of each detector under signal-present and signal-absent draws.

    Returns ``(T1, T0)`` arrays of shape ``(replications, len(detectors))``;
    failed fits are NaN. The signal-absent draw uses the same model with
    ``beta1 = 0`` and is still fitted with ``s`` as a covariate.
    """
    if config.f0 is None:
        raise ValueError("detection scenarios need a signal frequency f0")
    items = [(config, tuple(detectors), c) for c in _children(config.seed, config.replications)]
    results = _map(_roc_rep, items, workers)
    return np.array([r[0] for r in results]), np.array([r[1] for r in results])


@dataclass
class RocCurve:
    """Detection probability against empirical false-alarm rate."""

    pfa_nominal: np.ndarray
    pfa_hat: np.ndarray
    pd_hat: np.ndarray
    failures: int

    @property
    def points(self):
        pts = sorted(set(zip(self.pfa_hat.tolist(), self.pd_hat.tolist())) | {(0.0, 0.0), (1.0, 1.0)})
        return np.array(pts)

    @property
    def area(self):
        pts = self.points
        x, y = pts[:, 0], pts[:, 1]
        return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


def roc_from_statistics(t1, t0, pfa_grid=PFA_GRID, dof=1):
    """Build a :class:`RocCurve` from Wald statistics of one detector.

    At each nominal false-alarm rate the chi-squared threshold is applied to
    both samples: the signal-absent rejection rate is the empirical false-alarm
    rate, the signal-present one the detection probability.
    """
    t1 = np.asarray(t1, dtype=float)
    t0 = np.asarray(t0, dtype=float)
    failures = int(np.sum(~np.isfinite(t1) & ~np.isposinf(t1)) + np.sum(~np.isfinite(t0) & ~np.isposinf(t0)))
    t1 = t1[~np.isnan(t1)]
    t0 = t0[~np.isnan(t0)]
    grid = np.asarray(pfa_grid, dtype=float)
    thr = np.array([threshold_for(a, dof) for a in grid])
    pd = np.array([np.mean(t1 > c) if t1.size else np.nan for c in thr])
    pf = np.array([np.mean(t0 > c) if t0.size else np.nan for c in thr])
    return RocCurve(grid, pf, pd, failures)


def mc_roc(config, detectors=DETECTORS, workers=1):
    """ROC curve for each detector over ``config.pfa_grid``."""
    t1, t0 = detector_statistics(config, detectors, workers)
    return {d: roc_from_statistics(t1[:, j], t0[:, j], config.pfa_grid) for j, d in enumerate(detectors)}
