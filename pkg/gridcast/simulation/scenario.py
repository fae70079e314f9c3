"""Simulation scenarios: JSON documents describing communities and their synthetic processes."""

from __future__ import annotations

import dataclasses
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

from gridcast.errors import SeriesError
from gridcast.forecasting import DiffArModel, fit_diff_ar
from gridcast.seeding import component_rng

from .engine import SimConfig
from .llmu import BulkPolicy, Community
from .synth import DEFAULT_PEAK_HOUR, synth_process


if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

    import numpy as np

    from .synth import Profile


logger = logging.getLogger(__name__)

type Forecasters = Mapping[tuple[str, int], DiffArModel]


def _reject_unknown(kind: str, cls: type, data: Mapping[str, Any], extra: Iterable[str] = ()) -> None:
    known = {f.name for f in dataclasses.fields(cls)} | set(extra)
    unknown = sorted(set(data) - known)
    if unknown:
        msg = f"unknown {kind} fields: {', '.join(unknown)}"
        raise ValueError(msg)


@dataclass(frozen=True, slots=True)
class ProcessSpec:
    """Parameters of :func:`~gridcast.simulation.synth_process` for one series."""

    profile: Profile = "flat"
    base_kw: float = 0.0
    amplitude_kw: float = 0.0
    ar_phi: tuple[float, ...] = ()
    noise_sigma: float = 0.0
    peak_hour: float = DEFAULT_PEAK_HOUR
    integrated: bool = False

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ProcessSpec:
        _reject_unknown("process", cls, data)
        values = dict(data)
        if "ar_phi" in values:
            values["ar_phi"] = tuple(float(v) for v in values["ar_phi"])
        return cls(**values)


@dataclass(frozen=True, slots=True)
class CommunitySpec:
    q: int
    s_q: float
    lam: float
    demand: ProcessSpec
    generation: ProcessSpec
    initial_storage_kwh: float | None = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> CommunitySpec:
        _reject_unknown("community", cls, data, ("lambda",))
        values = dict(data)
        if "lambda" in values:
            values["lam"] = values.pop("lambda")
        for name in ("demand", "generation"):
            values[name] = ProcessSpec.from_dict(values.get(name, {}))
        return cls(**values)


@dataclass(frozen=True, slots=True)
class Scenario:
    step_seconds: float
    horizon_steps: int
    communities: tuple[CommunitySpec, ...]
    seed: int = 0
    bulk: BulkPolicy = field(default_factory=BulkPolicy)
    storage_capacity_kwh: float | None = None
    warmup_steps: int = 2_000
    demand_order: int = 2
    generation_order: int = 2
    lookahead_steps: int = 1

    def __post_init__(self) -> None:
        if not self.communities:
            msg = "scenario needs at least one community"
            raise ValueError(msg)
        ids = [spec.q for spec in self.communities]
        if len(set(ids)) != len(ids):
            msg = f"duplicate community ids in scenario: {ids}"
            raise ValueError(msg)
        if self.warmup_steps < max(self.demand_order, self.generation_order) + 1:
            msg = "warmup_steps must cover the forecaster history"
            raise ValueError(msg)

    def sim_config(self, seed: int | None = None) -> SimConfig:
        return SimConfig(
            step_seconds=self.step_seconds,
            horizon_steps=self.horizon_steps,
            bulk=self.bulk,
            seed=self.seed if seed is None else seed,
            storage_capacity_kwh=self.storage_capacity_kwh,
            lookahead_steps=self.lookahead_steps,
        )

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Scenario:
        _reject_unknown("scenario", cls, data, ("order",))
        values = dict(data)
        order = values.pop("order", {})
        values.setdefault("demand_order", order.get("demand", 2))
        values.setdefault("generation_order", order.get("generation", 2))
        values["communities"] = tuple(CommunitySpec.from_dict(item) for item in values.get("communities", ()))
        if "bulk" in values:
            values["bulk"] = BulkPolicy(**values["bulk"])
        return cls(**values)


def load_scenario(path: str | Path) -> Scenario:
    """Read a :class:`Scenario` from a JSON document."""
    with Path(path).open(encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        msg = f"scenario must be a JSON object: {path}"
        raise TypeError(msg)
    return Scenario.from_dict(data)


def _forecaster(
    series: np.ndarray, order: int, quantity: str, q: int, forecasters: Forecasters | None
) -> DiffArModel:
    if forecasters is not None and (quantity, q) in forecasters:
        return forecasters[quantity, q]
    return _fit_or_persist(series, order, f"q{q} {quantity}")


def _fit_or_persist(series: np.ndarray, order: int, label: str) -> DiffArModel:
    try:
        return fit_diff_ar(series, order)
    except SeriesError as error:
        logger.warning("%s: falling back to a random-walk forecaster (%s)", label, error)
        return DiffArModel.random_walk(order)


def build_run(
    scenario: Scenario, seed: int | None = None, forecasters: Forecasters | None = None
) -> tuple[SimConfig, list[Community], dict[int, np.ndarray], dict[int, np.ndarray]]:
    """Generate the series, forecasters and initial states of one simulation run.

    Each community gets ``warmup_steps + horizon_steps`` samples per quantity. The warm-up part
    trains the ARIMA forecasters and fills their histories; the rest drives the simulation.
    Communities found in ``forecasters`` (keyed by quantity and community id) use those models
    instead and skip the fit.
    """
    config = scenario.sim_config(seed)
    total = scenario.warmup_steps + scenario.horizon_steps
    communities: list[Community] = []
    demand: dict[int, np.ndarray] = {}
    generation: dict[int, np.ndarray] = {}
    for spec in scenario.communities:
        series: dict[str, np.ndarray] = {}
        for quantity, process in (("demand", spec.demand), ("generation", spec.generation)):
            series[quantity] = synth_process(
                process.profile,
                process.base_kw,
                process.amplitude_kw,
                process.ar_phi,
                process.noise_sigma,
                total,
                component_rng(config.seed, f"q{spec.q}", quantity),
                step_seconds=scenario.step_seconds,
                peak_hour=process.peak_hour,
                integrated=process.integrated,
            )
        warm_d = series["demand"][: scenario.warmup_steps]
        warm_g = series["generation"][: scenario.warmup_steps]
        demand_model = _forecaster(warm_d, scenario.demand_order, "demand", spec.q, forecasters)
        generation_model = _forecaster(warm_g, scenario.generation_order, "generation", spec.q, forecasters)
        communities.append(
            Community(
                q=spec.q,
                s_q=spec.s_q,
                lam=spec.lam,
                demand_model=demand_model,
                generation_model=generation_model,
                storage_kwh=spec.initial_storage_kwh,
                demand_history=deque(warm_d[-(demand_model.order + 1) :].tolist()),
                generation_history=deque(warm_g[-(generation_model.order + 1) :].tolist()),
            )
        )
        demand[spec.q] = series["demand"][scenario.warmup_steps :]
        generation[spec.q] = series["generation"][scenario.warmup_steps :]
    return config, communities, demand, generation
