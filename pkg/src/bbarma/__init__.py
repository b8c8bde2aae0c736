"""Beta-binomial autoregressive moving average models for bounded count signals."""
from .baselines import (
    arma_detect,
    arma_fit,
    arma_forecast,
    gaussian_detect,
    holt_winters_fit,
    holt_winters_fit_forecast,
)
from .core import (
    FilterState,
    ModelSpec,
    ParamVector,
    SignalData,
    filter_signal,
    log_likelihood,
    loglik_terms,
    observed_information,
    score,
)
from .diagnostics import acf, arch_lm, box_pierce, goodness, ljung_box, pacf, portmanteau, residuals
from .distribution import BetaBinomial
from .estimate import FitOptions, FitResult, confidence_interval, fit, ols_init, select_order
from .estimator import BBARMA, ARMAForecaster, HoltWintersForecaster
from .exceptions import (
    BBARMAError,
    DetectionError,
    DiagnosticError,
    DomainError,
    FitError,
    IngestionError,
    InitializationError,
    NumericError,
)
from .forecast import Forecast, forecast
from .inference import DetectionReport, detect_signal, wald_test
from .io import ingest_csv
from .links import Link, get_link
from .montecarlo import SCENARIOS, RocCurve, ScenarioConfig, mc_estimation, mc_roc
from .simulate import simulate

__version__ = "0.1.0"
