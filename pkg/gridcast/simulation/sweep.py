"""Independent simulation runs over many seeds."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, Any

import pandas as pd

from gridcast.store import sweep_key

from .engine import empirical_adequacy, prefix_adequacy, run_simulation
from .scenario import build_run


if TYPE_CHECKING:
    from collections.abc import Iterable

    from gridcast.store import RecordStore

    from .engine import SimTrace
    from .scenario import Forecasters, Scenario


logger = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    "seed",
    "q",
    "empirical_adequacy",
    "adequate_to_end",
    "step_adequacy",
    "unmet_kwh",
    "bulk_kwh",
    "curtailed_kwh",
)


def summarize(trace: SimTrace) -> list[dict[str, Any]]:
    """Return one summary row per community of ``trace``."""
    summary: list[dict[str, Any]] = []
    for q in trace.communities:
        rows = trace.for_community(q)
        prefix = prefix_adequacy(trace, q)
        summary.append(
            {
                "seed": trace.config.seed,
                "q": q,
                "empirical_adequacy": empirical_adequacy(trace, q),
                "adequate_to_end": bool(prefix[-1]),
                "step_adequacy": sum(row.adequate for row in rows) / len(rows),
                "unmet_kwh": trace.total("unmet_kwh", q),
                "bulk_kwh": trace.total("bulk_kwh", q),
                "curtailed_kwh": trace.total("curtailed_kwh", q),
            }
        )
    return summary


def run_seed(scenario: Scenario, seed: int, forecasters: Forecasters | None = None) -> SimTrace:
    config, communities, demand, generation = build_run(scenario, seed, forecasters)
    return run_simulation(config, communities, demand, generation)


def sweep_seeds(
    scenario: Scenario,
    seeds: Iterable[int],
    *,
    store: RecordStore | None = None,
    workers: int = 1,
    forecasters: Forecasters | None = None,
) -> pd.DataFrame:
    """Simulate ``scenario`` once per seed and collect the per-community summaries.

    Seeds run concurrently on ``workers`` threads; every run is independent, so the result does
    not depend on the worker count. When ``store`` is given each seed's summary is written to
    ``seed<n>`` below its namespace. ``forecasters`` are handed to :func:`build_run` unchanged.
    """
    if workers < 1:
        msg = f"workers must be at least 1, got {workers}"
        raise ValueError(msg)
    seed_list = list(seeds)

    def run(seed: int) -> list[dict[str, Any]]:
        summary = summarize(run_seed(scenario, seed, forecasters))
        if store is not None:
            _ = store.put(*sweep_key(seed).parts, value=summary)
        return summary

    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="gridcast-sweep") as pool:
        results = list(pool.map(run, seed_list))
    logger.info("swept %d seeds", len(seed_list))
    rows = [row for summary in results for row in summary]
    return pd.DataFrame(rows, columns=list(SWEEP_COLUMNS))
