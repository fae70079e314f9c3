"""Partition of the timeline into calendar/weather cells and their training rows."""

from __future__ import annotations

import bisect
import math
from collections import defaultdict
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import TYPE_CHECKING

from .config import SECONDS_PER_DAY


if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from .config import GridConfig
    from .dataset import Observation


WEEKEND = 1
BUSINESS_DAY = 2
_SATURDAY = 5

Segment = list["Observation"]


@dataclass(frozen=True, slots=True, order=True)
class CellFamily:
    """A cell ``I_ijk^(w,q)``: every day's cell sharing calendar position and weather."""

    community: int
    year_part: int
    week_part: int
    day_part: int
    weather: str

    @property
    def label(self) -> str:
        return f"i{self.year_part}-j{self.week_part}-k{self.day_part}-{self.weather}"


@dataclass(frozen=True, slots=True, order=True)
class CalendarKey:
    """The atomic cell ``I_ijk^(w,q,v)`` of the partition."""

    year_part: int
    week_part: int
    day_part: int
    weather: str
    community: int
    day: int

    @property
    def family(self) -> CellFamily:
        return CellFamily(self.community, self.year_part, self.week_part, self.day_part, self.weather)


@dataclass(frozen=True, slots=True)
class TrainingRow:
    """Regressors ``x1..x4`` and the average power ``y`` of one cell."""

    years: int
    weeks: int
    days: int
    temperature: float
    value: float

    @property
    def features(self) -> tuple[float, float, float, float]:
        return (float(self.years), float(self.weeks), float(self.days), self.temperature)


def _anniversary(epoch: datetime, years: int) -> datetime:
    try:
        return epoch.replace(year=epoch.year + years)
    except ValueError:
        # Feb 29 epoch in a common year
        return epoch.replace(year=epoch.year + years, month=3, day=1)


def _year_position(moment: datetime, epoch: datetime) -> tuple[int, int]:
    """Return full years since the epoch and the day offset inside the current year cycle."""
    years = moment.year - epoch.year
    if _anniversary(epoch, years) > moment:
        years -= 1
    start = _anniversary(epoch, years)
    return years, (moment.date() - start.date()).days


def _week_position(day: date, *, split_week: bool) -> tuple[int, int]:
    weekday = day.weekday()
    if not split_week:
        return WEEKEND, weekday
    if weekday >= _SATURDAY:
        return WEEKEND, weekday - _SATURDAY
    return BUSINESS_DAY, weekday


def _check_timestamp(timestamp: float, config: GridConfig) -> None:
    if not math.isfinite(timestamp) or timestamp < 0 or timestamp > config.horizon_seconds:
        msg = f"timestamp {timestamp} s lies outside the horizon [0, {config.horizon_seconds}] s"
        raise ValueError(msg)


def partition_key(timestamp: float, weather: str, q: int, config: GridConfig) -> CalendarKey:
    """Return the cell containing ``timestamp`` seconds after the epoch.

    All partition intervals are half-open, so a timestamp on a boundary belongs to the later
    part.
    """
    _check_timestamp(timestamp, config)
    if weather not in config.weather_labels:
        msg = f"unknown weather label {weather!r}"
        raise ValueError(msg)

    moment = config.epoch + timedelta(seconds=timestamp)
    _, day_offset = _year_position(moment, config.epoch)
    year_part = bisect.bisect_right(config.year_part_boundaries, day_offset)
    week_part, _ = _week_position(moment.date(), split_week=config.split_week)
    elapsed_days, second_of_day = divmod(timestamp, SECONDS_PER_DAY)
    day_part = bisect.bisect_right(config.day_part_boundaries, second_of_day)
    return CalendarKey(year_part, week_part, day_part, weather, q, int(elapsed_days) + 1)


def key_for(observation: Observation, config: GridConfig) -> CalendarKey:
    """Return the cell of an observation."""
    return partition_key(observation.tau * config.step_seconds, observation.weather, observation.community, config)


def calendar_features(key: CalendarKey, config: GridConfig) -> tuple[int, int, int]:
    """Return ``(x1, x2, x3)``: years elapsed, weeks into the year part, days into the week part."""
    moment = config.epoch + timedelta(days=key.day - 1)
    years, day_offset = _year_position(moment, config.epoch)
    part_start = config.year_part_boundaries[key.year_part - 1]
    _, days = _week_position(moment.date(), split_week=config.split_week)
    return years, (day_offset - part_start) // 7, days


def segment_observations(dataset: Iterable[Observation], key: CalendarKey, config: GridConfig) -> Segment:
    """Return the observations falling into ``key``, ordered by tau."""
    return sorted((obs for obs in dataset if key_for(obs, config) == key), key=lambda obs: obs.tau)


def partition_dataset(dataset: Iterable[Observation], config: GridConfig) -> dict[CalendarKey, Segment]:
    """Group a dataset into its non-empty cells in a single pass."""
    cells: dict[CalendarKey, Segment] = defaultdict(list)
    for obs in sorted(dataset, key=lambda obs: (obs.community, obs.tau)):
        cells[key_for(obs, config)].append(obs)
    return dict(sorted(cells.items()))


def split_runs(segment: Sequence[Observation]) -> list[Segment]:
    """Split a segment wherever consecutive samples are not adjacent steps."""
    runs: list[Segment] = []
    for obs in sorted(segment, key=lambda obs: obs.tau):
        if runs and obs.tau == runs[-1][-1].tau + 1:
            runs[-1].append(obs)
        else:
            runs.append([obs])
    return runs


def aggregate_segment(segment: Sequence[Observation], quantity: str, config: GridConfig) -> TrainingRow:
    """Average a segment into one training row.

    Raises
    ------
    ValueError
        If the segment is empty or spans more than one cell.
    """
    if not segment:
        msg = "cannot aggregate an empty segment"
        raise ValueError(msg)
    keys = {key_for(obs, config) for obs in segment}
    if len(keys) != 1:
        msg = f"segment spans {len(keys)} cells; expected exactly one"
        raise ValueError(msg)
    (key,) = keys
    years, weeks, days = calendar_features(key, config)
    # exactly rounded sums keep the row independent of the sample order
    temperature = math.fsum(obs.temperature_c for obs in segment) / len(segment)
    value = math.fsum(obs.value(quantity) for obs in segment) / len(segment)
    return TrainingRow(years, weeks, days, temperature, value)


def training_rows(
    dataset: Iterable[Observation], quantity: str, config: GridConfig
) -> dict[CellFamily, list[TrainingRow]]:
    """Build the training rows of every cell family, one row per run of every non-empty cell."""
    rows: dict[CellFamily, list[TrainingRow]] = defaultdict(list)
    for key, segment in partition_dataset(dataset, config).items():
        rows[key.family].extend(aggregate_segment(run, quantity, config) for run in split_runs(segment))
    return dict(sorted(rows.items()))
