"""Families of adequacy curves over ``lambda`` and ``sigma2``, with optional simulation."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from .bound import NoiseParams, StorageSpec, adequacy_lower_bound
from .paths import DEFAULT_CHUNK, survival_curve


if TYPE_CHECKING:
    from collections.abc import Sequence
    from pathlib import Path


logger = logging.getLogger(__name__)

CSV_COLUMNS = ("lambda", "sigma2", "t", "bound", "empirical", "n_paths")


@dataclass(frozen=True, slots=True)
class MonteCarloSettings:
    """Simulation settings for the empirical column of a curve table."""

    n_paths: int
    n_steps: int = 1_000
    seed: int = 0
    bridge: bool = True
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK


@dataclass(frozen=True, slots=True)
class AdequacyCurve:
    """Lower bound of the adequacy ratio over a time grid for one ``(lambda, sigma2)`` pair."""

    lam: float
    sigma2: float
    t: tuple[float, ...]
    bound: tuple[float, ...]
    empirical: tuple[float, ...] | None = None
    n_paths: int = 0


def _empirical(lam: float, sigma2: float, t_grid: np.ndarray, settings: MonteCarloSettings) -> tuple[float, ...]:
    # lam is the whole initial store so that any lambda <= s_q is admissible
    spec = StorageSpec(s_q=lam, lam=lam)
    t_end = float(t_grid.max())
    curve = survival_curve(
        spec,
        NoiseParams(sigma2, 0.0),
        t_end,
        settings.n_steps,
        settings.n_paths,
        settings.seed,
        bridge=settings.bridge,
        chunk_size=settings.chunk_size,
        workers=settings.workers,
    )
    indices = np.clip(np.rint(t_grid / t_end * settings.n_steps).astype(int), 0, settings.n_steps)
    return tuple(float(value) for value in curve[indices])


def curve_table(
    lambdas: Sequence[float],
    sigma2s: Sequence[float],
    t_grid: Sequence[float],
    monte_carlo: MonteCarloSettings | None = None,
) -> list[AdequacyCurve]:
    """Evaluate the bound for every ``(lambda, sigma2)`` pair on ``t_grid``.

    With ``monte_carlo`` every curve also gets simulated ratios, read from one simulation over
    ``max(t_grid)`` at the grid step nearest to each ``t``.
    """
    if len(lambdas) == 0 or len(sigma2s) == 0 or len(t_grid) == 0:
        msg = "lambdas, sigma2s and t_grid must not be empty"
        raise ValueError(msg)
    times = np.asarray(t_grid, dtype=float)
    curves: list[AdequacyCurve] = []
    for lam in lambdas:
        for sigma2 in sigma2s:
            bound = adequacy_lower_bound(lam, sigma2, times)
            empirical = None if monte_carlo is None else _empirical(lam, sigma2, times, monte_carlo)
            curves.append(
                AdequacyCurve(
                    lam=float(lam),
                    sigma2=float(sigma2),
                    t=tuple(float(t) for t in times),
                    bound=tuple(float(b) for b in bound),
                    empirical=empirical,
                    n_paths=0 if monte_carlo is None else monte_carlo.n_paths,
                )
            )
            logger.debug("curve lambda=%g sigma2=%g evaluated on %d points", lam, sigma2, times.size)
    return curves


def curves_frame(curves: Sequence[AdequacyCurve]) -> pd.DataFrame:
    """Flatten curves into one row per ``(lambda, sigma2, t)``."""
    records = [
        (
            curve.lam,
            curve.sigma2,
            t,
            bound,
            np.nan if curve.empirical is None else curve.empirical[index],
            curve.n_paths,
        )
        for curve in curves
        for index, (t, bound) in enumerate(zip(curve.t, curve.bound, strict=True))
    ]
    return pd.DataFrame.from_records(records, columns=list(CSV_COLUMNS))


def write_curves_csv(curves: Sequence[AdequacyCurve], path: str | Path) -> None:
    """Write curves as ``lambda,sigma2,t,bound,empirical,n_paths``."""
    curves_frame(curves).to_csv(path, index=False, float_format="%.17g")
