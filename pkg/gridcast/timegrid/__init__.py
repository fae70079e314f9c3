"""Calendar/weather partition of the historical timeline and data ingestion."""

from .calendar import (
    BUSINESS_DAY,
    WEEKEND,
    CalendarKey,
    CellFamily,
    Segment,
    TrainingRow,
    aggregate_segment,
    calendar_features,
    key_for,
    partition_dataset,
    partition_key,
    segment_observations,
    split_runs,
    training_rows,
)
from .config import QUANTITIES, GridConfig, Quantity, load_config
from .dataset import Observation, communities, load_csv, series_for, write_csv


__all__ = [
    "BUSINESS_DAY",
    "QUANTITIES",
    "WEEKEND",
    "CalendarKey",
    "CellFamily",
    "GridConfig",
    "Observation",
    "Quantity",
    "Segment",
    "TrainingRow",
    "aggregate_segment",
    "calendar_features",
    "communities",
    "key_for",
    "load_config",
    "load_csv",
    "partition_dataset",
    "partition_key",
    "segment_observations",
    "series_for",
    "split_runs",
    "training_rows",
]
