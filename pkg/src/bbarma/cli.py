"""Command-line interface.

Every command writes ``report.json`` (versioned schema) plus plot-ready CSV
files into ``--out-dir``. Options can also come from a ``key = value`` file
given with ``--config``; command-line flags win over the file.
"""
import argparse
import os
import sys
import time

import numpy as np

from . import io
from .baselines import arma_detect, arma_fit, arma_forecast, gaussian_detect, holt_winters_fit
from .core import ModelSpec, ParamVector, SignalData, filter_signal
from .diagnostics import acf, goodness, pacf, portmanteau, residuals
from .estimate import FitOptions, confidence_interval, fit
from .exceptions import BBARMAError
from .forecast import forecast
from .inference import detect_signal
from .links import LINKS
from .montecarlo import DETECTORS, SCENARIOS, mc_estimation, mc_roc
from .simulate import cosine_signal, simulate

__all__ = ["main", "build_parser"]


def _floats(text):
    text = str(text).strip()
    return [float(v) for v in text.split(",") if v.strip()] if text else []


def _ints(text):
    return [int(v) for v in _floats(text)]


def _add_common(p):
    p.add_argument("--config", help="key = value file supplying defaults for any flag")
    p.add_argument("--out-dir", default="bbarma-out", help="directory for report.json and CSV outputs")
    p.add_argument("--seed", type=int, default=2024)


def _add_model(p, default_p=1, default_q=0):
    p.add_argument("--p", type=int, default=default_p, help="autoregressive order")
    p.add_argument("--q", type=int, default=default_q, help="moving-average order")
    p.add_argument("--link", choices=sorted(LINKS), default="logit")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--grad-tol", type=float, default=None)


def _add_data(p):
    p.add_argument("--signal-file", required=True, help="CSV with integer column y and optional covariates")
    p.add_argument("--k", type=int, required=True, help="upper bound K of the counts (must be declared)")
    p.add_argument("--covariates", default=None, help="comma-separated covariate columns (default: none)")
    p.add_argument("--harmonic", type=float, default=None,
                   help="append the covariate cos(2 pi n / PERIOD), n = 1..N")


def build_parser():
    parser = argparse.ArgumentParser(prog="bbarma", description="Beta-binomial ARMA modelling toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a signal from a BBARMA model")
    _add_common(p)
    _add_model(p)
    p.add_argument("--scenario", choices=sorted(SCENARIOS), help="use a built-in parameter set")
    p.add_argument("--n", type=int, default=500, help="signal length")
    p.add_argument("--k", type=int, default=255)
    p.add_argument("--zeta", type=float, default=0.0)
    p.add_argument("--beta", type=_floats, default=[], help="comma-separated covariate coefficients")
    p.add_argument("--phi", type=_floats, default=[], help="comma-separated AR coefficients")
    p.add_argument("--theta", type=_floats, default=[], help="comma-separated MA coefficients")
    p.add_argument("--precision", type=float, default=20.0)
    p.add_argument("--freq", type=float, default=None, help="covariate cos(2 pi f n) with this f")
    p.add_argument("--harmonic", type=float, default=None, help="covariate cos(2 pi n / PERIOD)")

    p = sub.add_parser("fit", help="estimate a BBARMA model by conditional maximum likelihood")
    _add_common(p)
    _add_model(p)
    _add_data(p)
    p.add_argument("--alpha", type=float, default=0.05, help="confidence-interval level 1 - alpha")

    p = sub.add_parser("detect", help="test for a known waveform in a signal")
    _add_common(p)
    _add_model(p, 1, 1)
    p.add_argument("--signal-file", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--candidate", choices=["cos"], default="cos")
    p.add_argument("--freq", type=float, required=True)
    p.add_argument("--pfa", type=float, default=0.05)
    p.add_argument("--detector", choices=DETECTORS, default="bbarma")

    p = sub.add_parser("forecast", help="out-of-signal forecasts")
    _add_common(p)
    _add_model(p)
    _add_data(p)
    p.add_argument("--h", type=int, default=12, help="forecast horizon")
    p.add_argument("--future-covariates", default=None, help="CSV with the covariate columns for the next H steps")
    p.add_argument("--forecaster", choices=["bbarma", "arma", "holt-winters"], default="bbarma")
    p.add_argument("--period", type=int, default=None, help="Holt-Winters season length")
    p.add_argument("--actual-file", default=None, help="CSV of realised values (column y) for RMSE/MdAE/MASE")

    p = sub.add_parser("diagnose", help="residual correlogram and portmanteau tests")
    _add_common(p)
    _add_model(p)
    _add_data(p)
    p.add_argument("--lags", type=int, default=20)

    p = sub.add_parser("mc-estimate", help="Monte Carlo study of the estimator")
    _add_common(p)
    p.add_argument("--scenario", choices=sorted(SCENARIOS), default="I")
    p.add_argument("--sizes", type=_ints, default=[150, 300, 500], help="comma-separated signal lengths")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.10)

    p = sub.add_parser("mc-roc", help="Monte Carlo ROC curves of the detectors")
    _add_common(p)
    p.add_argument("--scenario", choices=sorted(SCENARIOS), default="III")
    p.add_argument("--n", type=int, default=None, help="signal length (default: scenario's)")
    p.add_argument("--reps", type=int, default=5000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--detector", type=lambda s: [d.strip() for d in s.split(",")],
                   default=list(DETECTORS), help="comma-separated subset of bbarma,arma,gaussian")
    return parser


def _config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _parse(argv):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    path = _config_path(argv)
    command = next((t for t in argv if t in COMMANDS), None)
    if path and command:
        conf = io.read_config(path)
        subparser = parser._subparsers._group_actions[0].choices[command]
        actions = {a.dest: a for a in subparser._actions}
        unknown = set(conf) - set(actions)
        if unknown:
            parser.error(f"unknown keys in {path}: {', '.join(sorted(unknown))}")
        # string defaults go through each flag's type conversion at parse time
        subparser.set_defaults(**conf)
        for dest in conf:
            actions[dest].required = False
    return parser.parse_args(argv)


def _spec(args, n_cov, K):
    return ModelSpec(p=args.p, q=args.q, n_covariates=n_cov, K=K, link=args.link)


def _options(args):
    return FitOptions(max_iters=args.max_iters, grad_tol=args.grad_tol)


def _harmonic(period, n):
    return np.cos(2.0 * np.pi * np.asarray(n, dtype=float) / period)


def _load(args):
    cov = None if args.covariates is None else [c.strip() for c in args.covariates.split(",") if c.strip()]
    data = io.ingest_csv(args.signal_file, args.k, cov if cov is not None else [])
    if args.harmonic:
        X = np.column_stack([data.X, _harmonic(args.harmonic, np.arange(1, data.N + 1))])
        data = SignalData(data.y, data.K, X)
    return data


def _fit_payload(res, alpha=None):
    out = {
        "parameters": res.spec.param_names(),
        "estimates": res.gamma,
        "std_err": res.std_err if res.std_err is not None else None,
        "loglik": res.loglik,
        "aic": res.aic, "sic": res.sic, "hq": res.hq,
        "n_obs": res.n_obs, "n_iters": res.n_iters,
        "converged": res.converged, "grad_norm": res.grad_norm,
        "model": {"p": res.spec.p, "q": res.spec.q, "K": res.spec.K,
                  "n_covariates": res.spec.n_covariates, "link": res.spec.link.name},
    }
    if alpha is not None and res.std_err is not None:
        out["alpha"] = alpha
        out["conf_int"] = confidence_interval(res, alpha)
    return out


def _fitted_rows(res, data):
    m = res.spec.m
    mu = filter_signal(res.spec, res.params_hat, data, order=0).mu
    eps = np.full(data.N, np.nan)
    eps[m:] = residuals(res, data)
    return [(n + 1, int(data.y[n]), data.K * mu[n], eps[n]) for n in range(data.N)]


def cmd_simulate(args, out):
    if args.scenario:
        sc = SCENARIOS[args.scenario]
        spec, params, f0 = sc.spec, sc.true_params, sc.f0
        N = args.n
    else:
        n_cov = len(args.beta)
        spec = _spec(args, n_cov, args.k)
        params = ParamVector(args.zeta, args.beta, args.phi, args.theta, args.precision)
        f0, N = args.freq, args.n
    X = None
    if args.harmonic and not args.scenario:
        X = _harmonic(args.harmonic, np.arange(1, N + 1))[:, None]
        f0 = None
    data = simulate(spec, params, N, args.seed, X=X, f0=f0)
    cols = [f"x{j + 1}" for j in range(data.n_covariates)]
    io.write_csv(os.path.join(out, "signal.csv"), ["y"] + cols,
                 [[int(v)] + list(x) for v, x in zip(data.y, data.X)])
    return {"model": {"p": spec.p, "q": spec.q, "K": spec.K, "link": spec.link.name},
            "parameters": spec.param_names(), "values": params.to_array(),
            "N": N, "seed": args.seed, "files": ["signal.csv"]}


def cmd_fit(args, out):
    data = _load(args)
    res = fit(_spec(args, data.n_covariates, data.K), data, _options(args))
    io.write_csv(os.path.join(out, "fitted.csv"), ["n", "y", "mu_K", "resid"], _fitted_rows(res, data))
    return {**_fit_payload(res, args.alpha), "files": ["fitted.csv"]}


def cmd_detect(args, out):
    data = io.ingest_csv(args.signal_file, args.k, [])
    s = cosine_signal(args.freq, np.arange(1, data.N + 1))
    if args.detector == "bbarma":
        spec = ModelSpec(p=args.p, q=args.q, n_covariates=1, K=data.K, link=args.link)
        rep = detect_signal(data, s, spec, args.pfa, _options(args))
    elif args.detector == "arma":
        rep = arma_detect(data.y.astype(float), s, args.p, args.q, args.pfa)
    else:
        rep = gaussian_detect(data.y.astype(float), s, args.pfa)
    return {"detector": args.detector, "candidate": args.candidate, "freq": args.freq,
            "wald_stat": rep.wald_stat, "dof": rep.dof, "threshold": rep.threshold,
            "p_value": rep.p_value, "detected": rep.detected, "pfa": rep.pfa,
            "beta1": rep.estimate}


def _future_X(args, data, H):
    parts = []
    if args.future_covariates:
        Xf = io.read_series(args.future_covariates)
        parts.append(Xf.reshape(H, -1))
    if args.harmonic:
        parts.append(_harmonic(args.harmonic, np.arange(data.N + 1, data.N + H + 1))[:, None])
    return np.column_stack(parts) if parts else None


def cmd_forecast(args, out):
    data = _load(args)
    H = args.h
    Xf = _future_X(args, data, H)
    payload = {"forecaster": args.forecaster, "h": H}
    if args.forecaster == "bbarma":
        res = fit(_spec(args, data.n_covariates, data.K), data, _options(args))
        fc = forecast(res, data, H, Xf)
        pred, mu = fc.y_hat, fc.mu_hat
        payload["fit"] = _fit_payload(res)
    elif args.forecaster == "arma":
        res = arma_fit(data.y.astype(float), data.X if data.n_covariates else None, args.p, args.q)
        pred = arma_forecast(res, data.y, H, Xf if data.n_covariates else None)
        mu = pred / data.K
    else:
        period = args.period or (int(args.harmonic) if args.harmonic else 12)
        pred = holt_winters_fit(data.y.astype(float), period).forecast(H)
        mu = pred / data.K
    rows = [(data.N + h + 1, mu[h], pred[h]) for h in range(H)]
    io.write_csv(os.path.join(out, "forecast.csv"), ["n", "mu_hat", "y_hat"], rows)
    payload.update({"mu_hat": mu, "y_hat": pred, "files": ["forecast.csv"]})
    if args.actual_file:
        actual = io.read_series(args.actual_file, "y")[:H]
        rmse, mdae, mase = goodness(actual, np.asarray(pred, dtype=float)[:actual.size], data.y)
        payload["accuracy"] = {"rmse": rmse, "mdae": mdae, "mase": mase}
    return payload


def cmd_diagnose(args, out):
    data = _load(args)
    res = fit(_spec(args, data.n_covariates, data.K), data, _options(args))
    eps = residuals(res, data)
    tests = portmanteau(eps, args.lags, args.p + args.q)
    r, pr = acf(eps, args.lags), pacf(eps, args.lags)
    io.write_csv(os.path.join(out, "correlogram.csv"), ["lag", "acf", "pacf"],
                 [(k, r[k], pr[k]) for k in range(args.lags + 1)])
    io.write_csv(os.path.join(out, "residuals.csv"), ["n", "y", "mu_K", "resid"], _fitted_rows(res, data))
    return {"fit": _fit_payload(res), "lags": args.lags,
            "tests": {k: {"statistic": v.statistic, "p_value": v.p_value, "dof": v.dof}
                      for k, v in tests.items()},
            "residual_mean": float(eps.mean()), "residual_var": float(eps.var(ddof=1)),
            "files": ["correlogram.csv", "residuals.csv"]}


def cmd_mc_estimate(args, out):
    base = SCENARIOS[args.scenario].with_(replications=args.reps, seed=args.seed, alpha=args.alpha)
    tables, files = [], []
    for N in args.sizes:
        tab = mc_estimation(base.with_(N=N), workers=args.workers)
        name = f"estimation_N{N}.csv"
        tab.to_csv(os.path.join(out, name))
        tables.append(tab.to_dict())
        files.append(name)
    return {"scenario": args.scenario, "replications": args.reps, "seed": args.seed,
            "tables": tables, "files": files}


def cmd_mc_roc(args, out):
    bad = set(args.detector) - set(DETECTORS)
    if bad:
        raise ValueError(f"unknown detector(s): {', '.join(sorted(bad))}")
    config = SCENARIOS[args.scenario].with_(replications=args.reps, seed=args.seed)
    if config.f0 is None:
        raise ValueError(f"scenario {args.scenario} has no signal; use III or IV")
    if args.n:
        config = config.with_(N=args.n)
    curves = mc_roc(config, tuple(args.detector), workers=args.workers)
    payload = {"scenario": args.scenario, "replications": args.reps, "seed": args.seed,
               "N": config.N, "detectors": {}, "files": []}
    for name, c in curves.items():
        fname = f"roc_{name}.csv"
        io.write_csv(os.path.join(out, fname), ["pfa_nominal", "pfa_hat", "pd_hat"],
                     zip(c.pfa_nominal, c.pfa_hat, c.pd_hat))
        payload["detectors"][name] = {"area": c.area, "failures": c.failures,
                                      "pfa_nominal": c.pfa_nominal, "pfa_hat": c.pfa_hat,
                                      "pd_hat": c.pd_hat}
        payload["files"].append(fname)
    return payload


COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "detect": cmd_detect,
    "forecast": cmd_forecast,
    "diagnose": cmd_diagnose,
    "mc-estimate": cmd_mc_estimate,
    "mc-roc": cmd_mc_roc,
}


def main(argv=None):
    args = _parse(argv)
    os.makedirs(args.out_dir, exist_ok=True)
    t0 = time.perf_counter()
    try:
        payload = COMMANDS[args.command](args, args.out_dir)
    except (BBARMAError, ValueError, OSError) as err:
        print(f"bbarma {args.command}: error: {err}", file=sys.stderr)
        return 1
    payload["elapsed_seconds"] = time.perf_counter() - t0
    path = os.path.join(args.out_dir, "report.json")
    io.write_json(path, args.command, payload)
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
