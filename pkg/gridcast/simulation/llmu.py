"""Local Load Management Unit: per-community storage accounting and bulk requests."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Literal

from gridcast.forecasting import DiffArModel, forecast_path


if TYPE_CHECKING:
    from collections.abc import Iterable


BulkKind = Literal["unbounded", "capped", "disabled"]
BULK_KINDS: tuple[BulkKind, ...] = ("unbounded", "capped", "disabled")


@dataclass(frozen=True, slots=True)
class BulkPolicy:
    """How much backup energy the bulk generators deliver on request."""

    kind: BulkKind = "unbounded"
    max_kw: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in BULK_KINDS:
            msg = f"unknown bulk policy {self.kind!r}; expected one of {', '.join(BULK_KINDS)}"
            raise ValueError(msg)
        if self.kind == "capped" and not (self.max_kw is not None and self.max_kw > 0):
            msg = "capped bulk policy needs a positive max_kw"
            raise ValueError(msg)

    def clamp(self, request_kwh: float, step_hours: float) -> float:
        """Return the energy actually granted for ``request_kwh``."""
        if self.kind == "disabled" or request_kwh <= 0:
            return 0.0
        if self.kind == "capped" and self.max_kw is not None:
            return min(request_kwh, self.max_kw * step_hours)
        return request_kwh


@dataclass(slots=True)
class Community:
    """State of one community: storage, forecasters and recent observations."""

    q: int
    s_q: float
    lam: float
    demand_model: DiffArModel
    generation_model: DiffArModel
    storage_kwh: float | None = None
    demand_history: deque[float] = field(default_factory=deque)
    generation_history: deque[float] = field(default_factory=deque)
    capacity_kwh: float | None = None
    pending_bulk_kwh: float = 0.0

    def __post_init__(self) -> None:
        if not self.s_q >= 0:
            msg = f"community {self.q}: s_q must be non-negative"
            raise ValueError(msg)
        if not 0 <= self.lam <= self.s_q:
            msg = f"community {self.q}: lambda must lie in [0, s_q]"
            raise ValueError(msg)
        if self.storage_kwh is None:
            self.storage_kwh = self.s_q
        if self.storage_kwh < 0:
            msg = f"community {self.q}: storage must be non-negative"
            raise ValueError(msg)
        if self.capacity_kwh is not None and self.capacity_kwh < self.storage_kwh:
            msg = f"community {self.q}: capacity below the initial storage level"
            raise ValueError(msg)
        self.demand_history = deque(self.demand_history, maxlen=self.demand_model.order + 1)
        self.generation_history = deque(self.generation_history, maxlen=self.generation_model.order + 1)

    @property
    def threshold(self) -> float:
        """Storage level ``s_q - lambda`` that marks an adequacy breach."""
        return self.s_q - self.lam

    @property
    def level(self) -> float:
        return self.s_q if self.storage_kwh is None else self.storage_kwh

    def observe(self, demand_kw: float, generation_kw: float) -> None:
        """Append the latest measurements to the forecaster histories."""
        self.demand_history.append(demand_kw)
        self.generation_history.append(generation_kw)


@dataclass(frozen=True, slots=True)
class StepActions:
    """Energy flows of one LLMU step, all in kWh."""

    demand_kwh: float
    generation_kwh: float
    bulk_delivered_kwh: float
    bulk_requested_kwh: float
    delivered_kwh: float
    discharged_kwh: float
    charged_kwh: float
    curtailed_kwh: float
    unmet_kwh: float
    storage_kwh: float

    def balance_error(self) -> float:
        """Return supply minus use; zero up to rounding for every valid step."""
        supply = self.generation_kwh + self.bulk_delivered_kwh + self.discharged_kwh
        return supply - (self.delivered_kwh + self.charged_kwh + self.curtailed_kwh)


def _check_power(name: str, value: float) -> None:
    if not (math.isfinite(value) and value >= 0):
        msg = f"{name} must be a finite non-negative power, got {value}"
        raise ValueError(msg)


def _charge(community: Community, energy_kwh: float) -> tuple[float, float]:
    """Add energy to storage up to its capacity; return (stored, curtailed)."""
    room = math.inf if community.capacity_kwh is None else community.capacity_kwh - community.level
    stored = min(energy_kwh, max(room, 0.0))
    community.storage_kwh = community.level + stored
    return stored, energy_kwh - stored


def step_llmu(  # noqa: PLR0913
    community: Community,
    demand_now: float,
    gen_now: float,
    shat_next: float,
    *,
    step_seconds: float,
    bulk: BulkPolicy,
) -> StepActions:
    """Run one LLMU decision for ``community`` and update its state.

    Backup energy requested on the previous step arrives first. Then a deficit ``D > G`` is
    drawn from storage (the part storage cannot cover is unmet demand), while a surplus is split
    between the customers and the storage unit. Finally, when the forecast level ``shat_next``
    is at or below ``s_q - lambda``, ``s_q - shat_next`` kWh are requested for the next step.
    """
    _check_power("demand_now", demand_now)
    _check_power("gen_now", gen_now)
    if not math.isfinite(shat_next):
        msg = f"shat_next must be finite, got {shat_next}"
        raise ValueError(msg)

    step_hours = step_seconds / 3600.0
    demand_kwh = demand_now * step_hours
    generation_kwh = gen_now * step_hours

    bulk_delivered = community.pending_bulk_kwh
    community.pending_bulk_kwh = 0.0
    bulk_stored, bulk_curtailed = _charge(community, bulk_delivered)

    discharged = unmet = surplus_stored = surplus_curtailed = 0.0
    if demand_now > gen_now:
        needed = demand_kwh - generation_kwh
        discharged = min(needed, community.level)
        unmet = needed - discharged
        community.storage_kwh = community.level - discharged
    else:
        surplus_stored, surplus_curtailed = _charge(community, generation_kwh - demand_kwh)

    requested = 0.0
    if shat_next <= community.threshold:
        requested = bulk.clamp(community.s_q - shat_next, step_hours)
    community.pending_bulk_kwh = requested

    return StepActions(
        demand_kwh=demand_kwh,
        generation_kwh=generation_kwh,
        bulk_delivered_kwh=bulk_delivered,
        bulk_requested_kwh=requested,
        delivered_kwh=demand_kwh - unmet,
        discharged_kwh=discharged,
        charged_kwh=bulk_stored + surplus_stored,
        curtailed_kwh=bulk_curtailed + surplus_curtailed,
        unmet_kwh=unmet,
        storage_kwh=community.level,
    )


def forecast_means(model: DiffArModel, history: Iterable[float], steps: int = 1) -> list[float]:
    """Forecast ``steps`` future values; persistence while the history is shorter than ``a + 1``."""
    values = list(history)
    if len(values) < model.order + 1:
        return [values[-1] if values else 0.0] * steps
    return [forecast.mean for forecast in forecast_path(model, values[-(model.order + 1) :], steps)]


def project_storage(
    community: Community, demand_now: float, gen_now: float, *, step_seconds: float, lookahead: int = 1
) -> float:
    """Forecast ``S_hat(q, tau + 1)`` before acting on the current step.

    The level after the current flows is known exactly; each of the next ``lookahead`` steps
    adds forecast generation minus forecast demand. Histories must already include the current
    values.
    """
    if lookahead < 1:
        msg = f"lookahead must be at least 1, got {lookahead}"
        raise ValueError(msg)
    step_hours = step_seconds / 3600.0
    after_now = max(community.level + community.pending_bulk_kwh + (gen_now - demand_now) * step_hours, 0.0)
    if community.capacity_kwh is not None:
        after_now = min(after_now, community.capacity_kwh)
    demand_path = forecast_means(community.demand_model, community.demand_history, lookahead)
    generation_path = forecast_means(community.generation_model, community.generation_history, lookahead)
    return after_now + step_hours * sum(g - d for g, d in zip(generation_path, demand_path, strict=True))
