import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import solve_toeplitz
from scipy.signal import lfilter

from gridcast.errors import SeriesError
from gridcast.forecasting import (
    ArModel,
    DiffArModel,
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
    residual_whiteness,
    simulate_diff_ar,
    with_drift,
)


def _ar_series(phi: tuple[float, ...], n: int, seed: int, burn_in: int = 500) -> np.ndarray:
    shocks = np.random.default_rng(seed).standard_normal(n + burn_in)
    return np.asarray(lfilter([1.0], np.concatenate(([1.0], -np.asarray(phi))), shocks))[burn_in:]


def _sample_autocovariance(values: np.ndarray, lags: int) -> np.ndarray:
    centred = values - values.mean()
    return np.array([centred[: centred.size - k] @ centred[k:] / centred.size for k in range(lags + 1)])


def test_fit_ar_recovers_ar2_coefficients() -> None:
    model = fit_ar(_ar_series((0.5, -0.3), 10_000, seed=1), 2)
    assert model.phi == pytest.approx((0.5, -0.3), abs=0.05)
    assert model.sigma2 == pytest.approx(1.0, abs=0.05)
    assert model.stationary
    assert model.mu is None


def test_fit_ar_agrees_with_yule_walker() -> None:
    series = _ar_series((0.6, -0.2, 0.1), 10_000, seed=2)
    gamma = _sample_autocovariance(series, 3)
    yule_walker = solve_toeplitz(gamma[:3], gamma[1:])
    assert fit_ar(series, 3).phi == pytest.approx(tuple(yule_walker), abs=0.01)


def test_fit_diff_ar_recovers_arima_110() -> None:
    levels = 100.0 + np.cumsum(_ar_series((0.5,), 10_000, seed=3))
    model = fit_diff_ar(levels, 1)
    assert isinstance(model, DiffArModel)
    assert model.phi[0] == pytest.approx(0.5, abs=0.05)


def test_fit_ar_flags_non_stationary_coefficients(caplog: pytest.LogCaptureFixture) -> None:
    rng = np.random.default_rng(4)
    values = np.zeros(100)
    for t in range(1, 100):
        values[t] = 1.1 * values[t - 1] + rng.standard_normal()

    with caplog.at_level(logging.WARNING, logger="gridcast.forecasting.arima"):
        model = fit_ar(values, 1)

    assert not model.stationary
    assert "not stationary" in caplog.text


def test_fit_ar_rejects_degenerate_series() -> None:
    with pytest.raises(SeriesError, match="too short for order 2; need 20"):
        _ = fit_ar(np.arange(19.0), 2)
    with pytest.raises(SeriesError, match="series is constant"):
        _ = fit_ar(np.full(50, 3.0), 1)
    with pytest.raises(SeriesError, match="order must be at least 1"):
        _ = fit_ar(np.arange(50.0), 0)
    with pytest.raises(SeriesError, match="non-finite"):
        _ = fit_ar(np.array([1.0, np.nan] * 20), 1)


def test_is_stationary() -> None:
    assert is_stationary((0.5, -0.3))
    assert is_stationary((0.0, 0.0))
    assert not is_stationary((1.0,))
    assert not is_stationary((0.6, 0.5))


def test_forecast_ar_with_drift_example() -> None:
    model = with_drift(ArModel(1, (0.5,), 2.0), 100.0)
    forecast = forecast_ar_with_drift(model, [110.0], model.mu or 0.0, 4.0)
    assert forecast.mean == pytest.approx(105.0)
    assert forecast.variance == pytest.approx(2.0 + 0.25 * 4.0)
    assert forecast.horizon == 1


def test_forecast_ar_with_drift_uses_most_recent_value_last() -> None:
    model = ArModel(2, (0.6, 0.1), 1.0)
    forecast = forecast_ar_with_drift(model, [10.0, 20.0], 0.0, 0.0)
    assert forecast.mean == pytest.approx(0.6 * 20.0 + 0.1 * 10.0)
    with pytest.raises(ValueError, match="history must hold exactly 2 values, got 1"):
        _ = forecast_ar_with_drift(model, [10.0], 0.0, 0.0)


def test_forecast_diff_ar_example() -> None:
    model = DiffArModel(2, (0.4, 0.1), 1.0)
    assert expanded_coefficients(model.phi) == pytest.approx([1.4, -0.3, -0.1])
    forecast = forecast_diff_ar(model, [47.0, 48.0, 50.0])
    assert forecast.mean == pytest.approx(50.9)
    assert forecast.variance == 1.0
    with pytest.raises(ValueError, match="history must hold exactly 3 values, got 2"):
        _ = forecast_diff_ar(model, [48.0, 50.0])


def test_forecast_diff_ar_preserves_constants() -> None:
    rng = np.random.default_rng(5)
    for _ in range(1_000):
        order = int(rng.integers(1, 6))
        model = DiffArModel(order, tuple(rng.uniform(-1.0, 1.0, order)), 1.0)
        level = float(rng.uniform(0.0, 500.0))
        assert forecast_diff_ar(model, [level] * (order + 1)).mean == pytest.approx(level, rel=1e-9, abs=1e-9)


def test_level_recursion_matches_difference_form() -> None:
    rng = np.random.default_rng(6)
    model = DiffArModel(3, (0.3, -0.2, 0.1), 1.0)
    shocks = rng.standard_normal(1_000)
    initial = [20.0, 21.0, 20.5, 22.0]

    expected = simulate_diff_ar(model, initial, shocks)

    history = list(initial)
    levels = []
    for shock in shocks:
        level = forecast_diff_ar(model, history[-4:]).mean + shock
        history.append(level)
        levels.append(level)
    assert np.allclose(levels, expected, rtol=0.0, atol=1e-9)


def test_multi_step_variance_example() -> None:
    model = DiffArModel(1, (0.5,), 2.0)
    forecast = multi_step(model, [10.0, 12.0], 2)
    assert forecast.variance == pytest.approx(3.25 * 2.0)
    assert forecast.horizon == 2
    assert forecast.mean == pytest.approx(12.0 + 0.5 * 2.0 + 0.25 * 2.0)


def test_random_walk_forecasts_persist_with_linear_variance() -> None:
    model = DiffArModel.random_walk(2, sigma2=1.5)
    path = forecast_path(model, [3.0, 4.0, 5.0], 6)
    assert [f.mean for f in path] == pytest.approx([5.0] * 6)
    assert [f.variance for f in path] == pytest.approx([1.5 * h for h in range(1, 7)])
    assert impulse_weights(model, 6) == pytest.approx(np.ones(6))


@pytest.mark.parametrize(("phi", "h"), [((0.0,), 10), ((0.5,), 6), ((0.3, -0.2), 8)])
def test_multi_step_variance_matches_monte_carlo(phi: tuple[float, ...], h: int) -> None:
    model = DiffArModel(len(phi), phi, 1.0)
    rng = np.random.default_rng(7)
    n_paths = 100_000
    increments = np.zeros((n_paths, len(phi)))
    level = np.zeros(n_paths)
    for _ in range(h):
        step = increments @ np.asarray(phi) + rng.standard_normal(n_paths)
        increments = np.column_stack([step, increments[:, :-1]])
        level += step
    predicted = multi_step(model, [0.0] * (len(phi) + 1), h).variance
    assert float(np.var(level)) == pytest.approx(predicted, rel=0.1)


def test_forecast_path_rejects_non_positive_horizon() -> None:
    with pytest.raises(ValueError, match="horizon must be at least 1, got 0"):
        _ = multi_step(DiffArModel.random_walk(), [1.0, 1.0], 0)


@given(st.lists(st.floats(min_value=-0.9, max_value=0.9), min_size=1, max_size=4))
def test_impulse_weights_match_unit_shock_response(phi: list[float]) -> None:
    model = DiffArModel(len(phi), tuple(phi), 1.0)
    shocks = np.zeros(8)
    shocks[0] = 1.0
    response = simulate_diff_ar(model, [0.0] * (len(phi) + 1), shocks)
    assert impulse_weights(model, 8) == pytest.approx(response, abs=1e-9)


def test_residual_whiteness_separates_good_and_misspecified_models() -> None:
    series = _ar_series((0.5, -0.3), 10_000, seed=8)
    assert residual_whiteness(fit_ar(series, 2), series) < 0.06
    assert residual_whiteness(fit_ar(series, 1), series) > 0.1


def test_model_records_roundtrip() -> None:
    ar = ArModel(2, (0.5, -0.3), 1.2, mu=40.0)
    diff = DiffArModel(1, (0.4,), 0.8, stationary=False)
    assert model_to_dict(ar) == {"kind": "ar", "a": 2, "phi": [0.5, -0.3], "mu": 40.0, "sigma2": 1.2, "stationary": True}
    assert model_from_dict(model_to_dict(ar)) == ar
    assert model_from_dict(model_to_dict(diff)) == diff
    with pytest.raises(ValueError, match="unknown model kind: 'arma'"):
        _ = model_from_dict({"kind": "arma", "a": 1, "phi": [0.1], "sigma2": 1.0})


def test_model_validation() -> None:
    with pytest.raises(ValueError, match="needs 2 coefficients, got 1"):
        _ = ArModel(2, (0.5,), 1.0)
    with pytest.raises(ValueError, match="noise variance must be positive"):
        _ = ArModel(1, (0.5,), 0.0)
    with pytest.raises(ValueError, match="noise variance must be non-negative"):
        _ = DiffArModel(1, (0.5,), -1.0)
