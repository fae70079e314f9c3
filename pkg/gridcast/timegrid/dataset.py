"""Observation records and CSV ingestion."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import pandas as pd

from gridcast.errors import DatasetError


if TYPE_CHECKING:
    from collections.abc import Iterable
    from pathlib import Path

    from .config import GridConfig


logger = logging.getLogger(__name__)

COLUMNS = ("tau", "community", "demand_kw", "generation_kw", "temperature_c", "weather")
# header is line 1, the first data row line 2
_FIRST_DATA_LINE = 2


@dataclass(frozen=True, slots=True)
class Observation:
    """One sample of a community at step ``tau``."""

    tau: int
    community: int
    demand_kw: float
    generation_kw: float
    temperature_c: float
    weather: str

    def __post_init__(self) -> None:
        if self.tau < 0:
            msg = f"tau must be non-negative, got {self.tau}"
            raise ValueError(msg)
        for name in ("demand_kw", "generation_kw"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                msg = f"{name} must be a finite non-negative power, got {value}"
                raise ValueError(msg)
        if not math.isfinite(self.temperature_c):
            msg = f"temperature_c must be finite, got {self.temperature_c}"
            raise ValueError(msg)

    def value(self, quantity: str) -> float:
        """Return the demand or generation power of this sample."""
        if quantity == "demand":
            return self.demand_kw
        if quantity == "generation":
            return self.generation_kw
        msg = f"unknown quantity: {quantity}"
        raise ValueError(msg)


def _parse_row(row: dict[str, str], line: int) -> Observation:
    try:
        tau = int(row["tau"])
        community = int(row["community"])
        demand = float(row["demand_kw"])
        generation = float(row["generation_kw"])
        temperature = float(row["temperature_c"])
    except (TypeError, ValueError) as error:
        msg = f"malformed value ({error})"
        raise DatasetError(msg, line=line) from error
    weather = row["weather"].strip() if isinstance(row["weather"], str) else ""
    try:
        return Observation(tau, community, demand, generation, temperature, weather)
    except ValueError as error:
        raise DatasetError(str(error), line=line) from error


def load_csv(path: str | Path, config: GridConfig) -> list[Observation]:
    """Read, validate and sort observations from ``path``.

    Raises
    ------
    DatasetError
        On a missing column, a malformed row, an unknown weather label, a step outside the
        horizon or a duplicate ``(community, tau)`` pair. Row errors carry the file line.
    """
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True, skip_blank_lines=False)
    missing = [column for column in COLUMNS if column not in frame.columns]
    if missing:
        msg = f"missing columns: {', '.join(missing)}"
        raise DatasetError(msg, line=1)

    labels = set(config.weather_labels)
    seen: dict[tuple[int, int], int] = {}
    observations: list[Observation] = []
    for offset, row in enumerate(frame[list(COLUMNS)].to_dict("records")):
        line = offset + _FIRST_DATA_LINE
        observation = _parse_row(row, line)
        if observation.weather not in labels:
            msg = f"unknown weather label {observation.weather!r}; expected one of {', '.join(config.weather_labels)}"
            raise DatasetError(msg, line=line)
        if observation.tau > config.horizon_steps:
            msg = f"tau {observation.tau} lies beyond the horizon of {config.horizon_steps} steps"
            raise DatasetError(msg, line=line)
        cell = (observation.community, observation.tau)
        if cell in seen:
            msg = f"duplicate sample for community {cell[0]} at tau {cell[1]} (first seen on line {seen[cell]})"
            raise DatasetError(msg, line=line)
        seen[cell] = line
        observations.append(observation)

    observations.sort(key=lambda obs: (obs.tau, obs.community))
    logger.info(
        "loaded %d observations for %d communities from %s", len(observations), len(communities(observations)), path
    )
    return observations


def write_csv(observations: Iterable[Observation], path: str | Path) -> None:
    """Write observations using the ingestion schema."""
    frame = pd.DataFrame(
        [
            (obs.tau, obs.community, obs.demand_kw, obs.generation_kw, obs.temperature_c, obs.weather)
            for obs in observations
        ],
        columns=list(COLUMNS),
    )
    frame.to_csv(path, index=False, float_format="%.17g")


def communities(observations: Iterable[Observation]) -> list[int]:
    """Return the sorted community ids present in ``observations``."""
    return sorted({obs.community for obs in observations})


def series_for(observations: Iterable[Observation], community: int, quantity: str) -> list[float]:
    """Return the tau-ordered series of ``quantity`` for one community."""
    selected = sorted((obs for obs in observations if obs.community == community), key=lambda obs: obs.tau)
    return [obs.value(quantity) for obs in selected]
