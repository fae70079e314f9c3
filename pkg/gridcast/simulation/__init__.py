"""Discrete-time simulation of LLMU-operated communities with a bulk-generation backstop."""

from .engine import (
    TRACE_COLUMNS,
    SimConfig,
    SimTrace,
    TraceRow,
    empirical_adequacy,
    prefix_adequacy,
    run_simulation,
)
from .llmu import BULK_KINDS, BulkPolicy, Community, StepActions, forecast_means, project_storage, step_llmu
from .scenario import CommunitySpec, Forecasters, ProcessSpec, Scenario, build_run, load_scenario
from .sweep import SWEEP_COLUMNS, run_seed, summarize, sweep_seeds
from .synth import PROFILES, profile_shape, synth_process


__all__ = [
    "BULK_KINDS",
    "PROFILES",
    "SWEEP_COLUMNS",
    "TRACE_COLUMNS",
    "BulkPolicy",
    "Community",
    "CommunitySpec",
    "Forecasters",
    "ProcessSpec",
    "Scenario",
    "SimConfig",
    "SimTrace",
    "StepActions",
    "TraceRow",
    "build_run",
    "empirical_adequacy",
    "forecast_means",
    "load_scenario",
    "prefix_adequacy",
    "project_storage",
    "run_seed",
    "run_simulation",
    "step_llmu",
    "summarize",
    "sweep_seeds",
    "synth_process",
]
