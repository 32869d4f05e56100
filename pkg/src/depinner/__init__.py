"""Depinning model of Josephson-junction resistance tuning, with the
junction characterisation chain (IV fits, breakdown, transmon spectra)."""

from .depinning import (
    BoundaryLine,
    DepinningParams,
    Regime,
    classify_point,
    creep_temperature,
    depinning_temperature,
    depinning_voltage,
    estimate_tau,
    fit_depinning_boundary,
    lambda_factor,
)
from .errors import ConvergenceError, DomainError, FitError, UndefinedCellError
from .fitting import (
    LogFit,
    PowerFit,
    TuningConditions,
    TuningCurve,
    compare_models,
    detect_failure,
    fit_log_model,
    fit_power_model,
    least_squares_fit,
)
from .self_heating import HeatParams, effective_temperature, heating_power, mean_temperature_rise

__version__ = "0.1.0"
