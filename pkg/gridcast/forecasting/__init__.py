"""Long-term (maximum-likelihood) and real-time (AR/ARIMA) forecasters."""

from .arima import (
    ArModel,
    DiffArModel,
    Forecast,
    expanded_coefficients,
    fit_ar,
    fit_diff_ar,
    forecast_ar_with_drift,
    forecast_diff_ar,
    forecast_path,
    impulse_weights,
    is_stationary,
    model_from_dict,
    model_to_dict,
    multi_step,
    one_step_residuals,
    residual_whiteness,
    simulate_diff_ar,
    with_drift,
)
from .mle import (
    COLUMNS,
    DesignMatrix,
    MleFit,
    build_design,
    fit_families,
    fit_mle,
    forecast_horizon,
    predict,
    residuals,
)


__all__ = [
    "COLUMNS",
    "ArModel",
    "DesignMatrix",
    "DiffArModel",
    "Forecast",
    "MleFit",
    "build_design",
    "expanded_coefficients",
    "fit_ar",
    "fit_diff_ar",
    "fit_families",
    "fit_mle",
    "forecast_ar_with_drift",
    "forecast_diff_ar",
    "forecast_horizon",
    "forecast_path",
    "impulse_weights",
    "is_stationary",
    "model_from_dict",
    "model_to_dict",
    "multi_step",
    "one_step_residuals",
    "predict",
    "residual_whiteness",
    "simulate_diff_ar",
    "with_drift",
]
