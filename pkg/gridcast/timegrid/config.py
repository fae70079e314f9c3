"""Grid configuration: sampling step, horizon, calendar partitions and weather labels."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Literal


SECONDS_PER_DAY = 86_400
DAYS_PER_YEAR_MAX = 366

Quantity = Literal["demand", "generation"]
QUANTITIES: tuple[Quantity, ...] = ("demand", "generation")


def _strictly_increasing(values: tuple[int, ...]) -> bool:
    return all(a < b for a, b in zip(values, values[1:], strict=False))


def _check_boundaries(name: str, values: tuple[int, ...], cycle: int) -> None:
    if not values:
        msg = f"{name} must contain at least one boundary"
        raise ValueError(msg)
    if values[0] != 0:
        msg = f"{name} must start at 0, the origin of the cycle"
        raise ValueError(msg)
    if not _strictly_increasing(values):
        msg = f"{name} must be strictly increasing"
        raise ValueError(msg)
    if values[-1] >= cycle:
        msg = f"{name} must lie below {cycle}"
        raise ValueError(msg)


@dataclass(frozen=True, slots=True)
class GridConfig:
    """Sampling grid and calendar partition of the historical timeline.

    Attributes
    ----------
    step_seconds
        Sampling step ``u`` in seconds.
    horizon_steps
        Number of steps ``T``; valid timestamps lie in ``[0, T*u]``.
    year_part_boundaries
        Start of every year part as a day offset from the start of the year cycle. Year cycles
        begin at ``epoch`` and at each of its anniversaries.
    day_part_boundaries
        Start of every day part in seconds after midnight.
    weather_labels
        Known weather conditions ``W``.
    epoch
        Wall-clock time of ``tau = 0``; must be a midnight.
    split_week
        Separate weekends (``j = 1``) from business days (``j = 2``).
    generation_split_week
        Week split used for the generation model, which by default treats the whole week alike.
    """

    step_seconds: float
    horizon_steps: int
    year_part_boundaries: tuple[int, ...] = (0,)
    day_part_boundaries: tuple[int, ...] = (0,)
    weather_labels: tuple[str, ...] = ("clear",)
    epoch: datetime = field(default_factory=lambda: datetime(2012, 1, 1))  # noqa: DTZ001
    split_week: bool = True
    generation_split_week: bool = False

    def __post_init__(self) -> None:
        if not self.step_seconds > 0:
            msg = "step_seconds must be positive"
            raise ValueError(msg)
        if self.horizon_steps < 1:
            msg = "horizon_steps must be at least 1"
            raise ValueError(msg)
        object.__setattr__(self, "year_part_boundaries", tuple(int(v) for v in self.year_part_boundaries))
        object.__setattr__(self, "day_part_boundaries", tuple(int(v) for v in self.day_part_boundaries))
        _check_boundaries("year_part_boundaries", self.year_part_boundaries, DAYS_PER_YEAR_MAX)
        _check_boundaries("day_part_boundaries", self.day_part_boundaries, SECONDS_PER_DAY)

        labels = tuple(sorted(set(self.weather_labels)))
        if not labels:
            msg = "weather_labels must not be empty"
            raise ValueError(msg)
        if any(not label or not label.strip() for label in labels):
            msg = "weather labels must be non-blank strings"
            raise ValueError(msg)
        object.__setattr__(self, "weather_labels", labels)

        if (self.epoch.hour, self.epoch.minute, self.epoch.second, self.epoch.microsecond) != (0, 0, 0, 0):
            msg = f"epoch must be a midnight, got {self.epoch.isoformat()}"
            raise ValueError(msg)

    @property
    def year_parts(self) -> int:
        """Number of year parts ``m``."""
        return len(self.year_part_boundaries)

    @property
    def day_parts(self) -> int:
        """Number of day parts ``d``."""
        return len(self.day_part_boundaries)

    @property
    def horizon_seconds(self) -> float:
        """Length ``T*u`` of the historical timeline."""
        return self.horizon_steps * self.step_seconds

    @property
    def step_hours(self) -> float:
        return self.step_seconds / 3600.0

    def for_quantity(self, quantity: Quantity) -> GridConfig:
        """Return the partition used to model ``quantity``."""
        if quantity == "demand":
            return self
        if quantity == "generation":
            return dataclasses.replace(self, split_week=self.generation_split_week)
        msg = f"unknown quantity: {quantity}"
        raise ValueError(msg)

    def to_dict(self) -> dict[str, Any]:
        return {
            "step_seconds": self.step_seconds,
            "horizon_steps": self.horizon_steps,
            "year_part_boundaries": list(self.year_part_boundaries),
            "day_part_boundaries": list(self.day_part_boundaries),
            "weather_labels": list(self.weather_labels),
            "epoch": self.epoch.isoformat(),
            "split_week": self.split_week,
            "generation_split_week": self.generation_split_week,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GridConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            msg = f"unknown grid config fields: {', '.join(unknown)}"
            raise ValueError(msg)
        values = dict(data)
        if "epoch" in values:
            values["epoch"] = datetime.fromisoformat(values["epoch"])
        for name in ("year_part_boundaries", "day_part_boundaries", "weather_labels"):
            if name in values:
                values[name] = tuple(values[name])
        return cls(**values)


def load_config(path: str | Path) -> GridConfig:
    """Read a :class:`GridConfig` from a JSON document."""
    with Path(path).open(encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        msg = f"grid config must be a JSON object: {path}"
        raise TypeError(msg)
    return GridConfig.from_dict(data)
