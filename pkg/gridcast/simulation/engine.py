"""Discrete-time simulation of communities operated by their LLMUs."""

from __future__ import annotations

import copy
import logging
from dataclasses import asdict, dataclass, field, fields
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from .llmu import BulkPolicy, Community, project_storage, step_llmu


if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence
    from pathlib import Path

    from numpy.typing import ArrayLike


logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("q", "tau", "demand_kw", "gen_kw", "storage_kwh", "bulk_kwh", "unmet_kwh", "shat_next_kwh", "adequate")


@dataclass(frozen=True, slots=True)
class SimConfig:
    step_seconds: float
    horizon_steps: int
    bulk: BulkPolicy = field(default_factory=BulkPolicy)
    seed: int = 0
    storage_capacity_kwh: float | None = None
    lookahead_steps: int = 1

    def __post_init__(self) -> None:
        if not self.step_seconds > 0:
            msg = f"step_seconds must be positive, got {self.step_seconds}"
            raise ValueError(msg)
        if self.horizon_steps < 1:
            msg = f"horizon_steps must be at least 1, got {self.horizon_steps}"
            raise ValueError(msg)
        if self.lookahead_steps < 1:
            msg = f"lookahead_steps must be at least 1, got {self.lookahead_steps}"
            raise ValueError(msg)
        if self.storage_capacity_kwh is not None and not self.storage_capacity_kwh > 0:
            msg = "storage_capacity_kwh must be positive when set"
            raise ValueError(msg)

    @property
    def step_hours(self) -> float:
        return self.step_seconds / 3600.0


@dataclass(frozen=True, slots=True)
class TraceRow:
    """Outcome of one community step; energies in kWh, powers in kW."""

    q: int
    tau: int
    demand_kw: float
    gen_kw: float
    storage_kwh: float
    bulk_kwh: float
    unmet_kwh: float
    shat_next_kwh: float
    adequate: bool
    bulk_requested_kwh: float = 0.0
    delivered_kwh: float = 0.0
    discharged_kwh: float = 0.0
    charged_kwh: float = 0.0
    curtailed_kwh: float = 0.0


@dataclass(slots=True)
class SimTrace:
    """Ordered per-step records of a simulation run."""

    config: SimConfig
    rows: list[TraceRow] = field(default_factory=list)

    def for_community(self, q: int) -> list[TraceRow]:
        return [row for row in self.rows if row.q == q]

    @property
    def communities(self) -> list[int]:
        return sorted({row.q for row in self.rows})

    def total(self, column: str, q: int | None = None) -> float:
        """Sum an energy column over all steps, optionally for one community."""
        rows = self.rows if q is None else self.for_community(q)
        return float(sum(getattr(row, column) for row in rows))

    def to_frame(self) -> pd.DataFrame:
        columns = [f.name for f in fields(TraceRow)]
        return pd.DataFrame([asdict(row) for row in self.rows], columns=columns)

    def write_csv(self, path: str | Path) -> None:
        frame = self.to_frame().loc[:, list(TRACE_COLUMNS)]
        frame["adequate"] = frame["adequate"].astype(int)
        frame.to_csv(path, index=False, float_format="%.17g")


def _series_for(
    name: str, series: Mapping[int, ArrayLike], communities: Sequence[Community], horizon: int
) -> dict[int, np.ndarray]:
    arrays: dict[int, np.ndarray] = {}
    for community in communities:
        if community.q not in series:
            msg = f"{name} series missing for community {community.q}"
            raise ValueError(msg)
        values = np.asarray(series[community.q], dtype=float)
        if values.ndim != 1 or values.size < horizon:
            msg = f"{name} series for community {community.q} is shorter than the horizon ({horizon} steps)"
            raise ValueError(msg)
        arrays[community.q] = values
    return arrays


def run_simulation(
    config: SimConfig,
    communities: Sequence[Community],
    demand_series: Mapping[int, ArrayLike],
    generation_series: Mapping[int, ArrayLike],
) -> SimTrace:
    """Run every community for ``config.horizon_steps`` steps.

    The inputs are not mutated; the run works on copies, so identical arguments always produce
    identical traces.
    """
    if not communities:
        msg = "at least one community is required"
        raise ValueError(msg)
    states = copy.deepcopy(list(communities))
    demand = _series_for("demand", demand_series, states, config.horizon_steps)
    generation = _series_for("generation", generation_series, states, config.horizon_steps)
    for state in states:
        if config.storage_capacity_kwh is not None and state.capacity_kwh is None:
            state.capacity_kwh = max(config.storage_capacity_kwh, state.level)

    trace = SimTrace(config)
    for tau in range(config.horizon_steps):
        for state in states:
            d_now = float(demand[state.q][tau])
            g_now = float(generation[state.q][tau])
            state.observe(d_now, g_now)
            shat = project_storage(
                state, d_now, g_now, step_seconds=config.step_seconds, lookahead=config.lookahead_steps
            )
            actions = step_llmu(state, d_now, g_now, shat, step_seconds=config.step_seconds, bulk=config.bulk)
            trace.rows.append(
                TraceRow(
                    q=state.q,
                    tau=tau,
                    demand_kw=d_now,
                    gen_kw=g_now,
                    storage_kwh=actions.storage_kwh,
                    bulk_kwh=actions.bulk_delivered_kwh,
                    unmet_kwh=actions.unmet_kwh,
                    shat_next_kwh=shat,
                    adequate=actions.storage_kwh > state.threshold,
                    bulk_requested_kwh=actions.bulk_requested_kwh,
                    delivered_kwh=actions.delivered_kwh,
                    discharged_kwh=actions.discharged_kwh,
                    charged_kwh=actions.charged_kwh,
                    curtailed_kwh=actions.curtailed_kwh,
                )
            )
    logger.debug("simulated %d communities for %d steps", len(states), config.horizon_steps)
    return trace


def prefix_adequacy(trace: SimTrace, q: int) -> np.ndarray:
    """Return 1 while community ``q`` has stayed above its threshold at every step so far."""
    rows = trace.for_community(q)
    if not rows:
        msg = f"trace has no rows for community {q}"
        raise ValueError(msg)
    flags = np.fromiter((row.adequate for row in rows), dtype=float, count=len(rows))
    return np.minimum.accumulate(flags)


def empirical_adequacy(trace: SimTrace, q: int) -> float:
    """Mean of :func:`prefix_adequacy` over the run."""
    return float(prefix_adequacy(trace, q).mean())
