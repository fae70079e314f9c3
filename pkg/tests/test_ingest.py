from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from gridcast.errors import DatasetError
from gridcast.timegrid import GridConfig, Observation, communities, load_csv, series_for, write_csv


if TYPE_CHECKING:
    from pathlib import Path


HEADER = "tau,community,demand_kw,generation_kw,temperature_c,weather\n"
CONFIG = GridConfig(step_seconds=900, horizon_steps=96, weather_labels=("clear", "cloudy"))


def _write(tmp_path: Path, body: str, header: str = HEADER) -> Path:
    path = tmp_path / "observations.csv"
    path.write_text(header + body, encoding="utf-8")
    return path


def test_load_csv_parses_and_sorts(tmp_path: Path) -> None:
    path = _write(tmp_path, "1,2,5.5,1.0,12.5,clear\n0,2,4.0,0.5,12.0,cloudy\n0,1,3.0,0.0,11.0, clear\n")
    observations = load_csv(path, CONFIG)

    assert [(obs.tau, obs.community) for obs in observations] == [(0, 1), (0, 2), (1, 2)]
    assert observations[0] == Observation(0, 1, 3.0, 0.0, 11.0, "clear")
    assert communities(observations) == [1, 2]
    assert series_for(observations, 2, "demand") == [4.0, 5.5]
    assert series_for(observations, 2, "generation") == [0.5, 1.0]


def test_write_csv_then_load_preserves_observations(tmp_path: Path) -> None:
    observations = [Observation(tau, 1, 0.1 * tau + 1 / 3, 2.0, -4.25, "clear") for tau in range(10)]
    path = tmp_path / "dataset.csv"
    write_csv(observations, path)
    assert load_csv(path, CONFIG) == observations


def test_missing_column_is_reported_on_the_header(tmp_path: Path) -> None:
    path = _write(tmp_path, "0,1,3.0,0.0,11.0\n", header="tau,community,demand_kw,generation_kw,temperature_c\n")
    with pytest.raises(DatasetError, match="line 1: missing columns: weather") as excinfo:
        _ = load_csv(path, CONFIG)
    assert excinfo.value.line == 1


def test_malformed_value_carries_line_number(tmp_path: Path) -> None:
    path = _write(tmp_path, "0,1,3.0,0.0,11.0,clear\n1,1,abc,0.0,11.0,clear\n")
    with pytest.raises(DatasetError, match="line 3: malformed value") as excinfo:
        _ = load_csv(path, CONFIG)
    assert excinfo.value.line == 3


def test_unknown_weather_label(tmp_path: Path) -> None:
    path = _write(tmp_path, "0,1,3.0,0.0,11.0,snow\n")
    with pytest.raises(DatasetError, match="line 2: unknown weather label 'snow'"):
        _ = load_csv(path, CONFIG)


def test_negative_power_is_rejected(tmp_path: Path) -> None:
    path = _write(tmp_path, "0,1,-3.0,0.0,11.0,clear\n")
    with pytest.raises(DatasetError, match="line 2: demand_kw must be a finite non-negative power"):
        _ = load_csv(path, CONFIG)


def test_tau_beyond_horizon_is_rejected(tmp_path: Path) -> None:
    path = _write(tmp_path, "97,1,3.0,0.0,11.0,clear\n")
    with pytest.raises(DatasetError, match="line 2: tau 97 lies beyond the horizon of 96 steps"):
        _ = load_csv(path, CONFIG)


def test_duplicate_sample_names_both_lines(tmp_path: Path) -> None:
    path = _write(tmp_path, "0,1,3.0,0.0,11.0,clear\n1,1,3.0,0.0,11.0,clear\n0,1,4.0,0.0,11.0,clear\n")
    with pytest.raises(DatasetError, match=r"line 4: duplicate sample .* \(first seen on line 2\)"):
        _ = load_csv(path, CONFIG)


def test_observation_value_rejects_unknown_quantity() -> None:
    with pytest.raises(ValueError, match="unknown quantity: wind"):
        _ = Observation(0, 1, 1.0, 1.0, 1.0, "clear").value("wind")
