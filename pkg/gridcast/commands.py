"""Implementations of the ``gridcast`` subcommands.

Every command reads its inputs, writes its outputs below ``out_dir`` and returns the paths it
wrote; :func:`gridcast.__main__.main` wraps them with a :class:`RunManifest`.
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import pandas as pd

from .adequacy import MonteCarloSettings, curve_table, write_curves_csv
from .forecasting import (
    ArModel,
    DiffArModel,
    MleFit,
    fit_ar,
    fit_diff_ar,
    fit_families,
    forecast_ar_with_drift,
    forecast_horizon,
    forecast_path,
    model_from_dict,
    model_to_dict,
    predict,
    residual_whiteness,
)
from .simulation import load_scenario, run_seed, summarize, sweep_seeds
from .store import DirectoryBackend, RecordKey, RecordStore, longterm_key, realtime_key
from .timegrid import QUANTITIES, communities, load_csv, partition_dataset, series_for, training_rows, write_csv


if TYPE_CHECKING:
    from collections.abc import Sequence

    from .timegrid import GridConfig, Quantity, TrainingRow


logger = logging.getLogger(__name__)

FORECAST_COLUMNS = ("step", "mean_kw", "variance_kw2")


@dataclass(slots=True)
class RunManifest:
    """Provenance record written next to the outputs of every command."""

    command: str
    config_path: str | None
    inputs: list[str]
    seed: int | None
    outputs: list[str] = field(default_factory=list)
    version: str = "0.0.0"
    duration_seconds: float = 0.0

    @property
    def file_name(self) -> str:
        return f"{self.command}.manifest.json"

    def write(self, out_dir: str | Path) -> Path:
        path = Path(out_dir) / self.file_name
        _write_json(path, asdict(self))
        return path


def _write_json(path: Path, payload: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        _ = handle.write("\n")


def _read_json(path: str | Path) -> Any:
    with Path(path).open(encoding="utf-8") as handle:
        return json.load(handle)


def model_store(out_dir: str | Path, namespace: str) -> RecordStore:
    """Open the record store that holds fitted models below ``<out_dir>/models``."""
    return RecordStore(DirectoryBackend(Path(out_dir) / "models"), namespace=namespace)


def cmd_ingest(csv_path: str | Path, config: GridConfig, out_dir: str | Path) -> list[Path]:
    """Validate a CSV of observations and write the normalized dataset with a summary."""
    observations = load_csv(csv_path, config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dataset_path = out / "dataset.csv"
    write_csv(observations, dataset_path)
    summary = {
        "rows": len(observations),
        "communities": communities(observations),
        "cells": len(partition_dataset(observations, config)),
    }
    summary_path = out / "ingest-summary.json"
    _write_json(summary_path, summary)
    logger.info("ingested %d rows for %d communities", summary["rows"], len(summary["communities"]))
    return [dataset_path, summary_path]


def _rows_by_community(rows: dict[Any, list[TrainingRow]]) -> dict[int, dict[str, list[TrainingRow]]]:
    grouped: dict[int, dict[str, list[TrainingRow]]] = defaultdict(dict)
    for family, family_rows in rows.items():
        grouped[family.community][family.label] = family_rows
    return dict(sorted(grouped.items()))


def cmd_fit_longterm(
    dataset_path: str | Path,
    config: GridConfig,
    out_dir: str | Path,
    quantities: Sequence[Quantity] = QUANTITIES,
    *,
    workers: int = 1,
) -> list[Path]:
    """Fit the long-term regression of every cell family and store one record per cell."""
    observations = load_csv(dataset_path, config)
    summary: dict[str, Any] = {"fitted": 0, "skipped": {}}
    with model_store(out_dir, "longterm") as store:
        for quantity in quantities:
            if store.pop(quantity, None) is not None:
                logger.info("replacing the stored long-term %s models", quantity)
            rows = training_rows(observations, quantity, config.for_quantity(quantity))
            for q, by_label in _rows_by_community(rows).items():
                fits, skipped = fit_families(by_label, workers=workers)
                for label, fit in fits.items():
                    _ = store.put(*longterm_key(quantity, q, label).parts, value=fit.to_dict())
                summary["fitted"] += len(fits)
                summary["skipped"].update({f"{quantity}:q{q}:{label}": reason for label, reason in skipped.items()})
    summary_path = Path(out_dir) / "fit-longterm-summary.json"
    _write_json(summary_path, summary)
    logger.info("fitted %d cells, skipped %d", summary["fitted"], len(summary["skipped"]))
    return [Path(out_dir) / "models" / "longterm", summary_path]


def cmd_fit_realtime(  # noqa: PLR0913
    dataset_path: str | Path,
    config: GridConfig,
    out_dir: str | Path,
    demand_order: int = 2,
    generation_order: int = 2,
    *,
    kind: str = "diff_ar",
) -> list[Path]:
    """Fit one real-time forecaster per community and quantity."""
    if kind not in {"ar", "diff_ar"}:
        msg = f"unknown real-time model kind: {kind}"
        raise ValueError(msg)
    observations = load_csv(dataset_path, config)
    orders: dict[Quantity, int] = {"demand": demand_order, "generation": generation_order}
    diagnostics: dict[str, Any] = {}
    with model_store(out_dir, "realtime") as store:
        for quantity in orders:
            if store.pop(quantity, None) is not None:
                logger.info("replacing the stored real-time %s models", quantity)
        for q in communities(observations):
            for quantity, order in orders.items():
                series = series_for(observations, q, quantity)
                model = fit_diff_ar(series, order) if kind == "diff_ar" else fit_ar(series, order)
                _ = store.put(*realtime_key(quantity, q).parts, value=model_to_dict(model))
                diagnostics[f"{quantity}:q{q}"] = {
                    "kind": model.kind,
                    "a": model.order,
                    "stationary": model.stationary,
                    "residual_whiteness": residual_whiteness(model, series),
                }
    summary_path = Path(out_dir) / "fit-realtime-summary.json"
    _write_json(summary_path, diagnostics)
    return [Path(out_dir) / "models" / "realtime", summary_path]


def load_model(ref: str | Path, out_dir: str | Path | None = None) -> ArModel | DiffArModel | MleFit:
    """Read a stored model record.

    ``ref`` is the path of a record file, or a record key such as ``realtime:demand:q1`` that is
    looked up in the model store below ``out_dir``.
    """
    if Path(ref).is_file():
        record = _read_json(ref)
    elif out_dir is not None and ":" in str(ref):
        key = RecordKey.parse(str(ref))
        with model_store(out_dir, key.namespace) as store:
            record = store.fetch(*key.parts)
    else:
        msg = f"no model record at {ref}"
        raise FileNotFoundError(msg)
    if not isinstance(record, dict):
        msg = f"model record must be a JSON object: {ref}"
        raise TypeError(msg)
    if "kind" in record:
        return model_from_dict(record)
    if "beta" in record:
        return MleFit.from_dict(record)
    msg = f"unrecognized model record: {ref}"
    raise ValueError(msg)


def stored_forecasters(models_dir: str | Path) -> dict[tuple[str, int], DiffArModel]:
    """Return the ARIMA forecasters stored below ``models_dir``, keyed by quantity and community."""
    forecasters: dict[tuple[str, int], DiffArModel] = {}
    with RecordStore(DirectoryBackend(models_dir), namespace="realtime") as store:
        for quantity in store:
            for label, record in store[quantity].items():
                model = model_from_dict(record)
                if not isinstance(model, DiffArModel):
                    msg = f"simulation needs ARIMA forecasters, realtime:{quantity}:{label} is {model.kind}"
                    raise TypeError(msg)
                forecasters[quantity, int(label.removeprefix("q"))] = model
    logger.info("loaded %d stored forecasters", len(forecasters))
    return forecasters


def _forecast_rows(  # noqa: PLR0913
    model: ArModel | DiffArModel | MleFit,
    horizon: int,
    history: Sequence[float],
    features: Sequence[Sequence[float]],
    longterm: MleFit | None,
) -> list[tuple[Any, float, float]]:
    if isinstance(model, DiffArModel):
        return [(f.horizon, f.mean, f.variance) for f in forecast_path(model, history[-(model.order + 1) :], horizon)]
    if isinstance(model, ArModel):
        if horizon != 1:
            msg = "AR-with-drift forecasts cover one step only"
            raise ValueError(msg)
        if longterm is None or len(features) != 1:
            msg = "AR-with-drift forecasts need a long-term model and one feature vector"
            raise ValueError(msg)
        mu_hat, mu_var = predict(longterm, features[0])
        forecast = forecast_ar_with_drift(model, history[-model.order :], mu_hat, mu_var)
        return [(1, forecast.mean, forecast.variance)]
    if not features:
        msg = "long-term forecasts need at least one feature vector"
        raise ValueError(msg)
    rows: list[tuple[Any, float, float]] = [
        (index, *predict(model, x)) for index, x in enumerate(features, start=1)
    ]
    total_mean, total_var = forecast_horizon([model] * len(features), features)
    rows.append(("total", total_mean, total_var))
    return rows


def cmd_forecast(  # noqa: PLR0913
    model_path: str | Path,
    out_dir: str | Path,
    *,
    horizon: int = 1,
    history: Sequence[float] = (),
    features: Sequence[Sequence[float]] = (),
    longterm_path: str | Path | None = None,
) -> list[Path]:
    """Forecast from a stored model and write ``forecast.csv``."""
    model = load_model(model_path, out_dir)
    longterm = None
    if longterm_path is not None:
        loaded = load_model(longterm_path, out_dir)
        if not isinstance(loaded, MleFit):
            msg = f"not a long-term model record: {longterm_path}"
            raise ValueError(msg)
        longterm = loaded
    rows = _forecast_rows(model, horizon, list(history), features, longterm)
    path = Path(out_dir) / "forecast.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows, columns=list(FORECAST_COLUMNS)).to_csv(path, index=False, float_format="%.17g")
    return [path]


def history_from_dataset(dataset_path: str | Path, config: GridConfig, community: int, quantity: str) -> list[float]:
    """Return the full series of one community and quantity from a dataset CSV."""
    series = series_for(load_csv(dataset_path, config), community, quantity)
    if not series:
        msg = f"dataset has no observations for community {community}"
        raise ValueError(msg)
    return series


def cmd_adequacy(  # noqa: PLR0913
    lambdas: Sequence[float],
    sigma2s: Sequence[float],
    t_max: float,
    t_points: int,
    out_dir: str | Path,
    monte_carlo: MonteCarloSettings | None = None,
) -> list[Path]:
    """Tabulate the adequacy lower bound (and optionally its Monte Carlo estimate)."""
    if t_points < 1 or not t_max > 0:
        msg = "the time grid needs t_max > 0 and at least one point"
        raise ValueError(msg)
    t_grid = np.linspace(t_max / t_points, t_max, t_points)
    curves = curve_table(lambdas, sigma2s, t_grid, monte_carlo)
    path = Path(out_dir) / "adequacy.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_curves_csv(curves, path)
    return [path]


def cmd_simulate(  # noqa: PLR0913
    scenario_path: str | Path,
    out_dir: str | Path,
    *,
    seed: int | None = None,
    sweep: int = 0,
    workers: int = 1,
    models_dir: str | Path | None = None,
) -> list[Path]:
    """Simulate a scenario; with ``sweep`` > 0 also run that many consecutive seeds.

    With ``models_dir`` the communities forecast with the real-time models stored there instead of
    models fitted on the synthetic warm-up.
    """
    scenario = load_scenario(scenario_path)
    forecasters = None if models_dir is None else stored_forecasters(models_dir)
    base_seed = scenario.seed if seed is None else seed
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    trace = run_seed(scenario, base_seed, forecasters)
    trace_path = out / "trace.csv"
    trace.write_csv(trace_path)
    summary = {
        "seed": base_seed,
        "steps": scenario.horizon_steps,
        "communities": summarize(trace),
        "totals": {
            column: trace.total(column) for column in ("unmet_kwh", "bulk_kwh", "bulk_requested_kwh", "curtailed_kwh")
        },
    }
    summary_path = out / "simulate-summary.json"
    _write_json(summary_path, summary)
    outputs = [trace_path, summary_path]

    if sweep > 0:
        with RecordStore(DirectoryBackend(out / "runs"), namespace="sweep") as store:
            frame = sweep_seeds(
                scenario, range(base_seed, base_seed + sweep), store=store, workers=workers, forecasters=forecasters
            )
        sweep_path = out / "sweep.csv"
        frame.to_csv(sweep_path, index=False, float_format="%.17g")
        outputs.append(sweep_path)
    return outputs
