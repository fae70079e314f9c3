"""Real-time forecasters: AR(a) with an injected drift and ARIMA(a,1,0).

Coefficients are estimated by conditional least squares on lagged values. Histories passed to
the forecasting functions are ordered oldest first, most recent last.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
from numpy.polynomial import polynomial
from statsmodels.tsa.stattools import acf

from gridcast.errors import SeriesError


if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from numpy.typing import ArrayLike


logger = logging.getLogger(__name__)

MIN_SAMPLES_PER_LAG = 10
WHITENESS_LAGS = 20


def _as_phi(phi: Sequence[float]) -> tuple[float, ...]:
    return tuple(float(value) for value in phi)


def is_stationary(phi: Sequence[float]) -> bool:
    """Return True when all roots of ``1 - sum(phi_l z^l)`` lie outside the unit disk."""
    coefficients = np.concatenate(([1.0], -np.asarray(phi, dtype=float)))
    if not np.any(coefficients[1:]):
        return True
    roots = polynomial.polyroots(np.trim_zeros(coefficients, "b"))
    return bool(np.all(np.abs(roots) > 1.0))


@dataclass(frozen=True, slots=True)
class ArModel:
    """AR(a) coefficients with white-noise variance and an optional drift ``mu``."""

    order: int
    phi: tuple[float, ...]
    sigma2: float
    mu: float | None = None
    stationary: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", _as_phi(self.phi))
        if self.order < 1 or len(self.phi) != self.order:
            msg = f"AR model of order {self.order} needs {self.order} coefficients, got {len(self.phi)}"
            raise ValueError(msg)
        if not self.sigma2 > 0:
            msg = f"noise variance must be positive, got {self.sigma2}"
            raise ValueError(msg)

    @property
    def kind(self) -> Literal["ar"]:
        return "ar"


@dataclass(frozen=True, slots=True)
class DiffArModel:
    """ARIMA(a,1,0): AR(a) coefficients of the first-differenced series."""

    order: int
    phi: tuple[float, ...]
    sigma2: float
    stationary: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", _as_phi(self.phi))
        if self.order < 1 or len(self.phi) != self.order:
            msg = f"ARIMA model of order {self.order} needs {self.order} coefficients, got {len(self.phi)}"
            raise ValueError(msg)
        if not self.sigma2 >= 0:
            msg = f"noise variance must be non-negative, got {self.sigma2}"
            raise ValueError(msg)

    @property
    def kind(self) -> Literal["diff_ar"]:
        return "diff_ar"

    @classmethod
    def random_walk(cls, order: int = 1, sigma2: float = 0.0) -> DiffArModel:
        """Return the persistence forecaster (all coefficients zero)."""
        return cls(order, (0.0,) * order, sigma2)


@dataclass(frozen=True, slots=True)
class Forecast:
    """Point forecast, error variance and horizon in steps."""

    mean: float
    variance: float
    horizon: int = 1


def model_to_dict(model: ArModel | DiffArModel) -> dict[str, Any]:
    """Serialize a model to its JSON record."""
    record: dict[str, Any] = {"kind": model.kind, "a": model.order, "phi": list(model.phi)}
    if isinstance(model, ArModel) and model.mu is not None:
        record["mu"] = model.mu
    record["sigma2"] = model.sigma2
    record["stationary"] = model.stationary
    return record


def model_from_dict(record: Mapping[str, Any]) -> ArModel | DiffArModel:
    """Rebuild a model from its JSON record."""
    kind = record.get("kind")
    common = {
        "order": int(record["a"]),
        "phi": _as_phi(record["phi"]),
        "sigma2": float(record["sigma2"]),
        "stationary": bool(record.get("stationary", True)),
    }
    if kind == "ar":
        mu = record.get("mu")
        return ArModel(mu=None if mu is None else float(mu), **common)
    if kind == "diff_ar":
        return DiffArModel(**common)
    msg = f"unknown model kind: {kind!r}"
    raise ValueError(msg)


def _check_series(series: ArrayLike, a: int) -> np.ndarray:
    if a < 1:
        msg = f"order must be at least 1, got {a}"
        raise SeriesError(msg)
    values = np.asarray(series, dtype=float)
    if values.ndim != 1:
        msg = "series must be one-dimensional"
        raise SeriesError(msg)
    if values.size < MIN_SAMPLES_PER_LAG * a:
        msg = f"series of length {values.size} is too short for order {a}; need {MIN_SAMPLES_PER_LAG * a}"
        raise SeriesError(msg)
    if not np.all(np.isfinite(values)):
        msg = "series contains non-finite values"
        raise SeriesError(msg)
    if np.ptp(values) == 0:
        msg = "series is constant; its autocovariance matrix is singular"
        raise SeriesError(msg)
    return values


def _lag_matrix(values: np.ndarray, a: int) -> tuple[np.ndarray, np.ndarray]:
    """Return lagged regressors (column l-1 holds lag l) and the aligned targets."""
    n = values.size
    lags = np.column_stack([values[a - lag : n - lag] for lag in range(1, a + 1)])
    return lags, values[a:]


def fit_ar(series: ArrayLike, a: int) -> ArModel:
    """Estimate AR(a) coefficients by conditional least squares on the centred series.

    The returned model carries no drift; inject it with :func:`with_drift`.

    Raises
    ------
    SeriesError
        If the series is shorter than ``10 * a`` or constant.
    """
    values = _check_series(series, a)
    centred = values - values.mean()
    lags, targets = _lag_matrix(centred, a)
    phi, *_ = np.linalg.lstsq(lags, targets, rcond=None)
    residual = targets - lags @ phi
    sigma2 = float(np.mean(residual**2))
    if not sigma2 > 0:
        msg = "series is perfectly predictable; noise variance is zero"
        raise SeriesError(msg)
    stationary = is_stationary(phi)
    if not stationary:
        logger.warning("fitted AR(%d) coefficients %s are not stationary", a, np.round(phi, 4).tolist())
    return ArModel(a, _as_phi(phi), sigma2, stationary=stationary)


def with_drift(model: ArModel, mu: float) -> ArModel:
    """Return a copy of ``model`` centred on the drift ``mu``."""
    return dataclasses.replace(model, mu=float(mu))


def _check_history(history: Sequence[float], expected: int) -> np.ndarray:
    values = np.asarray(history, dtype=float)
    if values.shape != (expected,):
        msg = f"history must hold exactly {expected} values, got {values.size}"
        raise ValueError(msg)
    return values


def forecast_ar_with_drift(model: ArModel, history: Sequence[float], mu_hat: float, mu_var: float) -> Forecast:
    """One-step forecast of the AR model centred on the long-term estimate ``mu_hat``.

    The long-term estimate carries its own error of variance ``mu_var``, independent of the
    AR innovation, which enters with weight ``1 - sum(phi)``.
    """
    values = _check_history(history, model.order)
    phi = np.asarray(model.phi)
    weight = 1.0 - float(phi.sum())
    mean = weight * mu_hat + float(phi @ values[::-1])
    return Forecast(mean, model.sigma2 + weight**2 * mu_var, 1)


def fit_diff_ar(series: ArrayLike, a: int) -> DiffArModel:
    """Estimate ARIMA(a,1,0) by fitting AR(a) to the first differences of ``series``."""
    values = np.asarray(series, dtype=float)
    if values.ndim != 1 or values.size < 2:  # noqa: PLR2004
        msg = "series must be one-dimensional with at least two values"
        raise SeriesError(msg)
    increments = fit_ar(np.diff(values), a)
    return DiffArModel(a, increments.phi, increments.sigma2, increments.stationary)


def expanded_coefficients(phi: Sequence[float]) -> np.ndarray:
    """Return the coefficients of ``D(tau-1) .. D(tau-a-1)`` in the level recursion."""
    phi_arr = np.asarray(phi, dtype=float)
    padded = np.concatenate((phi_arr, [0.0]))
    shifted = np.concatenate(([-1.0], phi_arr))
    return padded - shifted


def forecast_diff_ar(model: DiffArModel, history: Sequence[float]) -> Forecast:
    """One-step ARIMA(a,1,0) forecast from the last ``a + 1`` values."""
    values = _check_history(history, model.order + 1)
    mean = float(expanded_coefficients(model.phi) @ values[::-1])
    return Forecast(mean, model.sigma2, 1)


def impulse_weights(model: DiffArModel, h: int) -> np.ndarray:
    """Return the first ``h`` impulse-response weights of the level recursion."""
    coefficients = expanded_coefficients(model.phi)
    psi = np.zeros(h)
    psi[0] = 1.0
    for s in range(1, h):
        window = psi[max(0, s - coefficients.size) : s][::-1]
        psi[s] = float(coefficients[: window.size] @ window)
    return psi


def forecast_path(model: DiffArModel, history: Sequence[float], h: int) -> list[Forecast]:
    """Forecast steps ``1..h`` by iterating the recursion on its own predictions."""
    if h < 1:
        msg = f"horizon must be at least 1, got {h}"
        raise ValueError(msg)
    values = list(_check_history(history, model.order + 1))
    coefficients = expanded_coefficients(model.phi)
    cumulative = np.cumsum(impulse_weights(model, h) ** 2)
    path: list[Forecast] = []
    for step in range(h):
        mean = float(coefficients @ np.asarray(values[::-1][: coefficients.size]))
        path.append(Forecast(mean, model.sigma2 * float(cumulative[step]), step + 1))
        values.append(mean)
    return path


def multi_step(model: DiffArModel, history: Sequence[float], h: int) -> Forecast:
    """Forecast ``h`` steps ahead."""
    return forecast_path(model, history, h)[-1]


def simulate_diff_ar(model: DiffArModel, initial: Sequence[float], shocks: ArrayLike) -> np.ndarray:
    """Simulate the differenced-operator form: AR recursion on increments, then cumulate.

    ``initial`` holds the ``a + 1`` starting levels; the result continues them for every shock.
    """
    start = _check_history(initial, model.order + 1)
    eps = np.asarray(shocks, dtype=float)
    phi = np.asarray(model.phi)
    increments = list(np.diff(start))
    levels = np.empty(eps.size)
    level = start[-1]
    for index, shock in enumerate(eps):
        recent = np.asarray(increments[::-1][: model.order])
        step = float(phi @ recent) + shock
        increments.append(step)
        level += step
        levels[index] = level
    return levels


def one_step_residuals(model: ArModel | DiffArModel, series: ArrayLike) -> np.ndarray:
    """Return the in-sample one-step prediction errors of ``model`` on ``series``."""
    values = np.asarray(series, dtype=float)
    if isinstance(model, DiffArModel):
        working = np.diff(values)
    else:
        working = values - (values.mean() if model.mu is None else model.mu)
    if working.size <= model.order:
        msg = f"series too short to compute residuals for order {model.order}"
        raise SeriesError(msg)
    lags, targets = _lag_matrix(working, model.order)
    return targets - lags @ np.asarray(model.phi)


def residual_whiteness(model: ArModel | DiffArModel, series: ArrayLike, max_lag: int = WHITENESS_LAGS) -> float:
    """Return the largest absolute residual autocorrelation over lags ``1..max_lag``."""
    residual = one_step_residuals(model, series)
    if np.ptp(residual) == 0:
        return 0.0
    nlags = min(max_lag, residual.size - 1)
    correlations = acf(residual, nlags=nlags, fft=True)
    return float(np.max(np.abs(correlations[1:])))
