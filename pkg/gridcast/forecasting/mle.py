"""Long-term forecaster: maximum-likelihood linear regression per cell family.

The model of one family is ``y = [1, x1, x2, x3, x4] @ beta + N(0, sigma2)`` where ``y`` is the
average power of a cell. The estimator is the closed form ``beta = (X'X)^-1 X'Y`` with the ML
variance ``RSS / p``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np
import scipy.linalg

from gridcast.errors import SingularDesignError


if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from gridcast.timegrid import TrainingRow


logger = logging.getLogger(__name__)

COLUMNS = ("intercept", "years", "weeks", "days", "temperature")
N_COEFFICIENTS = len(COLUMNS)
MAX_CONDITION = 1e10


@dataclass(frozen=True, slots=True, eq=False)
class DesignMatrix:
    """Regressor matrix ``x`` (p x 5, leading column of ones) and targets ``y``."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 2 or x.shape[1] != N_COEFFICIENTS:  # noqa: PLR2004
            msg = f"design matrix must have shape (p, {N_COEFFICIENTS}), got {x.shape}"
            raise ValueError(msg)
        if y.shape != (x.shape[0],):
            msg = f"target vector must have length {x.shape[0]}, got shape {y.shape}"
            raise ValueError(msg)
        if not np.all(x[:, 0] == 1.0):
            msg = "column 0 of the design matrix must be identically 1"
            raise ValueError(msg)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def rows(self) -> int:
        return int(self.x.shape[0])


@dataclass(frozen=True, slots=True)
class MleFit:
    """Fitted coefficients and ML error variance of one cell family."""

    beta: tuple[float, ...]
    sigma2: float
    p: int
    cell: str = ""
    fitted: tuple[float, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.beta) != N_COEFFICIENTS:
            msg = f"beta must have {N_COEFFICIENTS} coefficients, got {len(self.beta)}"
            raise ValueError(msg)
        if not self.sigma2 >= 0:
            msg = f"sigma2 must be non-negative, got {self.sigma2}"
            raise ValueError(msg)

    def to_dict(self) -> dict[str, Any]:
        return {"cell": self.cell, "beta": list(self.beta), "sigma2": self.sigma2, "p": self.p}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> MleFit:
        return cls(
            beta=tuple(float(b) for b in data["beta"]),
            sigma2=float(data["sigma2"]),
            p=int(data["p"]),
            cell=str(data.get("cell", "")),
        )


def build_design(rows: Sequence[TrainingRow]) -> DesignMatrix:
    """Stack training rows into a design matrix with an intercept column."""
    if len(rows) < N_COEFFICIENTS:
        msg = f"at least {N_COEFFICIENTS} training rows are required, got {len(rows)}"
        raise ValueError(msg)
    features = np.array([row.features for row in rows], dtype=float)
    x = np.column_stack([np.ones(len(rows)), features])
    y = np.array([row.value for row in rows], dtype=float)
    return DesignMatrix(x, y)


def _offending_column(x: np.ndarray) -> str:
    for column in range(1, N_COEFFICIENTS):
        if np.linalg.matrix_rank(x[:, : column + 1]) < column + 1:
            return COLUMNS[column]
    # full numerical rank but badly scaled: blame the column dominating the weakest direction
    _, _, vt = np.linalg.svd(x, full_matrices=False)
    return COLUMNS[int(np.argmax(np.abs(vt[-1])))]


def fit_mle(design: DesignMatrix, cell: str = "") -> MleFit:
    """Fit the linear model by maximum likelihood.

    Raises
    ------
    SingularDesignError
        If ``X'X`` is singular or its condition number exceeds ``1e10``.
    """
    x, y = design.x, design.y
    gram = x.T @ x
    condition = float(np.linalg.cond(gram))
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularDesignError(_offending_column(x), condition)

    beta = scipy.linalg.solve(gram, x.T @ y, assume_a="sym")
    fitted = x @ beta
    residual = y - fitted
    sigma2 = float(residual @ residual) / design.rows
    return MleFit(
        beta=tuple(float(b) for b in beta),
        sigma2=sigma2,
        p=design.rows,
        cell=cell,
        fitted=tuple(float(v) for v in fitted),
    )


def predict(fit: MleFit, x: Sequence[float]) -> tuple[float, float]:
    """Return the predicted average power and its error variance for features ``x``."""
    if len(x) != N_COEFFICIENTS - 1:
        msg = f"expected {N_COEFFICIENTS - 1} features, got {len(x)}"
        raise ValueError(msg)
    row = np.concatenate(([1.0], np.asarray(x, dtype=float)))
    return float(row @ np.asarray(fit.beta)), fit.sigma2


def forecast_horizon(fits: Sequence[MleFit], xs: Sequence[Sequence[float]]) -> tuple[float, float]:
    """Forecast the summed average power over consecutive cells.

    Cell errors are independent normals, so their variances add.
    """
    if len(fits) != len(xs):
        msg = f"got {len(fits)} fits but {len(xs)} feature vectors"
        raise ValueError(msg)
    if not fits:
        msg = "at least one cell is required"
        raise ValueError(msg)
    predictions = [predict(fit, x) for fit, x in zip(fits, xs, strict=True)]
    return sum(mean for mean, _ in predictions), sum(var for _, var in predictions)


def residuals(fit: MleFit, design: DesignMatrix) -> np.ndarray:
    """Return ``Y - X beta`` on ``design``."""
    if fit.p != design.rows:
        msg = f"fit was estimated on {fit.p} rows, design has {design.rows}"
        raise ValueError(msg)
    return design.y - design.x @ np.asarray(fit.beta)


def _fit_family(label: str, rows: Sequence[TrainingRow]) -> MleFit | str:
    if len(rows) < N_COEFFICIENTS:
        return f"only {len(rows)} training rows"
    try:
        return fit_mle(build_design(rows), cell=label)
    except SingularDesignError as error:
        return str(error)


def fit_families(
    rows_by_family: Mapping[str, Sequence[TrainingRow]], *, workers: int = 1
) -> tuple[dict[str, MleFit], dict[str, str]]:
    """Fit every family, returning the fits and the reasons families were skipped.

    Families are independent, so they are fitted on a thread pool of ``workers`` threads.
    """
    labels = sorted(rows_by_family)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        outcomes = list(pool.map(lambda label: _fit_family(label, rows_by_family[label]), labels))

    fits: dict[str, MleFit] = {}
    skipped: dict[str, str] = {}
    for label, outcome in zip(labels, outcomes, strict=True):
        if isinstance(outcome, MleFit):
            fits[label] = outcome
        else:
            logger.warning("skipping cell %s: %s", label, outcome)
            skipped[label] = outcome
    return fits, skipped
