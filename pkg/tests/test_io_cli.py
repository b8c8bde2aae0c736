import json

import numpy as np
import pytest
from sklearn.exceptions import NotFittedError

from bbarma import BBARMA, ARMAForecaster, HoltWintersForecaster, SCENARIOS, simulate
from bbarma.cli import build_parser, main
from bbarma.exceptions import IngestionError
from bbarma.io import SCHEMA_VERSION, ingest_csv, read_config, read_series, write_json


def _write(path, text):
    path.write_text(text)
    return str(path)


def test_ingest_three_rows(tmp_path):
    data = ingest_csv(_write(tmp_path / "a.csv", "y,x1\n0,0.5\n7,1.0\n3,-2\n"), 7)
    assert data.N == 3 and data.K == 7
    np.testing.assert_array_equal(data.y, [0, 7, 3])
    np.testing.assert_allclose(data.X[:, 0], [0.5, 1.0, -2.0])


def test_ingest_selects_covariates(tmp_path):
    data = ingest_csv(_write(tmp_path / "a.csv", "a,y,b\n1,2,3\n4,5,6\n"), 9, ["b"])
    np.testing.assert_allclose(data.X[:, 0], [3, 6])
    assert ingest_csv(str(tmp_path / "a.csv"), 9, []).n_covariates == 0


@pytest.mark.parametrize("text, row, word", [
    ("y\n1\n8\n", 3, "exceeds"),
    ("y\n1\n-1\n", 3, "negative"),
    ("y\n1.5\n", 2, "integer"),
    ("y\nabc\n", 2, "number"),
    ("y,x\n1,2\n3\n", 3, "fields"),
])
def test_ingest_errors_name_row(tmp_path, text, row, word):
    with pytest.raises(IngestionError) as info:
        ingest_csv(_write(tmp_path / "bad.csv", text), 7)
    assert info.value.row == row
    assert f"row {row}" in str(info.value) and word in str(info.value)


def test_ingest_missing_y(tmp_path):
    with pytest.raises(IngestionError, match="y"):
        ingest_csv(_write(tmp_path / "bad.csv", "count\n1\n"), 7)


def test_read_series_and_config(tmp_path):
    np.testing.assert_allclose(read_series(_write(tmp_path / "s.csv", "1.5\n2\n")), [1.5, 2.0])
    np.testing.assert_allclose(read_series(_write(tmp_path / "t.csv", "a,y\n1,4\n2,5\n"), "y"), [4, 5])
    conf = read_config(_write(tmp_path / "c.cfg", "# comment\nmax-iters = 50\n\nlink = probit  # trailing\n"))
    assert conf == {"max_iters": "50", "link": "probit"}


def test_json_schema(tmp_path):
    doc = write_json(str(tmp_path / "r.json"), "fit", {"x": np.array([1.0, np.inf]), "n": np.int64(3)})
    loaded = json.loads((tmp_path / "r.json").read_text())
    assert loaded == doc
    assert loaded["schema_version"] == SCHEMA_VERSION and loaded["x"] == [1.0, "inf"] and loaded["n"] == 3


@pytest.fixture(scope="module")
def signal_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--out-dir", str(out), "--n", "120", "--k", "31", "--zeta", "0.3",
                 "--beta", "-1.0", "--theta", "0.7", "--p", "0", "--q", "1",
                 "--precision", "27", "--harmonic", "12", "--seed", "3"]) == 0
    return out / "signal.csv"


def _report(out):
    doc = json.loads((out / "report.json").read_text())
    assert doc["schema_version"] == SCHEMA_VERSION
    return doc


def test_cli_simulate(signal_file):
    doc = _report(signal_file.parent)
    assert doc["command"] == "simulate" and doc["N"] == 120
    header = signal_file.read_text().splitlines()[0]
    assert header == "y,x1"


def test_cli_fit(signal_file, tmp_path):
    assert main(["fit", "--signal-file", str(signal_file), "--k", "31", "--p", "0", "--q", "1",
                 "--covariates", "x1", "--out-dir", str(tmp_path)]) == 0
    doc = _report(tmp_path)
    assert doc["parameters"] == ["zeta", "beta1", "theta1", "precision"]
    assert doc["converged"] and len(doc["conf_int"]) == 4
    lines = (tmp_path / "fitted.csv").read_text().splitlines()
    assert lines[0] == "n,y,mu_K,resid" and len(lines) == 121


def test_cli_detect(signal_file, tmp_path):
    for det in ("bbarma", "arma", "gaussian"):
        assert main(["detect", "--signal-file", str(signal_file), "--k", "31", "--freq", "0.0833333333",
                     "--detector", det, "--out-dir", str(tmp_path / det)]) == 0
        doc = _report(tmp_path / det)
        assert doc["detector"] == det and isinstance(doc["detected"], bool)


@pytest.mark.parametrize("forecaster", ["bbarma", "arma", "holt-winters"])
def test_cli_forecast(signal_file, tmp_path, forecaster):
    actual = _write(tmp_path / "actual.csv", "y\n" + "\n".join(["10"] * 6) + "\n")
    argv = ["forecast", "--signal-file", str(signal_file), "--k", "31", "--p", "0", "--q", "1",
            "--covariates", "x1", "--h", "6", "--forecaster", forecaster, "--actual-file", actual,
            "--out-dir", str(tmp_path / "o")]
    future = _write(tmp_path / "fut.csv", "x1\n" + "\n".join(
        str(np.cos(2 * np.pi * n / 12)) for n in range(121, 127)) + "\n")
    argv += ["--future-covariates", future]
    assert main(argv) == 0
    doc = _report(tmp_path / "o")
    assert len(doc["y_hat"]) == 6 and set(doc["accuracy"]) == {"rmse", "mdae", "mase"}
    assert (tmp_path / "o" / "forecast.csv").read_text().startswith("n,mu_hat,y_hat")


def test_cli_diagnose_with_config(signal_file, tmp_path):
    cfg = _write(tmp_path / "run.cfg", f"signal-file = {signal_file}\nk = 31\np = 0\nq = 1\n"
                                       "covariates = x1\nlags = 10\n")
    assert main(["diagnose", "--config", cfg, "--out-dir", str(tmp_path)]) == 0
    doc = _report(tmp_path)
    assert doc["lags"] == 10 and set(doc["tests"]) >= {"ljung_box", "box_pierce"}
    assert len((tmp_path / "correlogram.csv").read_text().splitlines()) == 12


def test_cli_flags_override_config(tmp_path):
    cfg = _write(tmp_path / "run.cfg", "n = 40\nk = 10\n")
    assert main(["simulate", "--config", cfg, "--n", "30", "--phi", "0.5", "--out-dir", str(tmp_path)]) == 0
    assert _report(tmp_path)["N"] == 30
    assert build_parser().parse_args(["simulate"]).n == 500


def test_cli_unknown_config_key(tmp_path):
    cfg = _write(tmp_path / "run.cfg", "bogus = 1\n")
    with pytest.raises(SystemExit):
        main(["simulate", "--config", cfg, "--out-dir", str(tmp_path)])


def test_cli_mc_commands(tmp_path):
    assert main(["mc-estimate", "--scenario", "I", "--sizes", "100", "--reps", "4",
                 "--out-dir", str(tmp_path / "e")]) == 0
    doc = _report(tmp_path / "e")
    assert doc["files"] == ["estimation_N100.csv"]
    assert main(["mc-roc", "--scenario", "IV", "--reps", "4", "--detector", "gaussian,arma",
                 "--out-dir", str(tmp_path / "r")]) == 0
    doc = _report(tmp_path / "r")
    assert set(doc["detectors"]) == {"gaussian", "arma"}
    assert (tmp_path / "r" / "roc_arma.csv").read_text().startswith("pfa_nominal,pfa_hat,pd_hat")


def test_cli_reports_errors(tmp_path, capsys):
    bad = _write(tmp_path / "bad.csv", "y\n1\n99\n")
    assert main(["fit", "--signal-file", bad, "--k", "31", "--out-dir", str(tmp_path)]) == 1
    assert "row 3" in capsys.readouterr().err
    assert main(["mc-roc", "--scenario", "I", "--reps", "2", "--out-dir", str(tmp_path)]) == 1


def test_estimator_api():
    cfg = SCENARIOS["I"]
    data = simulate(cfg.spec, cfg.true_params, 300, seed=4)
    est = BBARMA(p=1, q=0, K=255)
    assert est.get_params()["p"] == 1
    with pytest.raises(NotFittedError):
        est.predict(3)
    est.fit(data.y)
    assert est.n_features_in_ == 0
    pred = est.predict(5)
    assert pred.shape == (5,) and np.all((pred >= 0) & (pred <= 255))
    assert est.score(data.y) == pytest.approx(est.result_.loglik / 299)
    assert est.conf_int().shape == (3, 2)
    assert est.wald_test([1], [0.0]).detected
    assert [row[0] for row in est.summary()] == ["zeta", "phi1", "precision"]
    assert est.residuals().size == 299


def test_baseline_estimators():
    y = 10 + np.tile([1.0, -1.0, 2.0, -2.0], 10)
    hw = HoltWintersForecaster(period=4).fit(y)
    np.testing.assert_allclose(hw.predict(4), y[:4], atol=1e-6)
    ar = ARMAForecaster(p=1, q=0).fit(np.sin(np.arange(50.0)))
    assert ar.predict(3).shape == (3,)
    with pytest.raises(NotFittedError):
        ARMAForecaster().predict(2)
