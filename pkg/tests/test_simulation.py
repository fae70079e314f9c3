from __future__ import annotations

import json
import logging
from typing import TYPE_CHECKING, Any

import numpy as np
import pandas as pd
import pytest

from gridcast.adequacy import NoiseParams, adequacy_lower_bound
from gridcast.forecasting import DiffArModel, fit_diff_ar
from gridcast.simulation import (
    TRACE_COLUMNS,
    BulkPolicy,
    Community,
    Scenario,
    SimConfig,
    SimTrace,
    TraceRow,
    build_run,
    empirical_adequacy,
    load_scenario,
    prefix_adequacy,
    project_storage,
    run_seed,
    run_simulation,
    step_llmu,
    sweep_seeds,
    synth_process,
)
from gridcast.store import DirectoryBackend, RecordStore


if TYPE_CHECKING:
    from pathlib import Path


QUARTER_HOUR = 900.0


def _community(storage: float = 10.0, s_q: float = 10.0, lam: float = 4.0, **kwargs: Any) -> Community:
    return Community(
        q=kwargs.pop("q", 1),
        s_q=s_q,
        lam=lam,
        demand_model=DiffArModel.random_walk(),
        generation_model=DiffArModel.random_walk(),
        storage_kwh=storage,
        **kwargs,
    )


def _scenario(**overrides: Any) -> Scenario:
    data: dict[str, Any] = {
        "step_seconds": QUARTER_HOUR,
        "horizon_steps": 96,
        "seed": 0,
        "warmup_steps": 500,
        "bulk": {"kind": "disabled"},
        "communities": [
            {
                "q": 1,
                "s_q": 30.0,
                "lambda": 23.6,
                "demand": {"profile": "flat", "base_kw": 20.0, "noise_sigma": 1.0},
                "generation": {"profile": "flat", "base_kw": 20.0, "noise_sigma": 1.0},
            }
        ],
    }
    data.update(overrides)
    return Scenario.from_dict(data)


def _deficit_scenario(bulk: dict[str, Any]) -> Scenario:
    return _scenario(
        bulk=bulk,
        seed=11,
        communities=[
            {
                "q": 1,
                "s_q": 10.0,
                "lambda": 5.0,
                "demand": {"profile": "flat", "base_kw": 25.0, "noise_sigma": 0.5},
                "generation": {"profile": "flat", "base_kw": 20.0, "noise_sigma": 0.5},
            }
        ],
    )


def _assert_balanced(trace: SimTrace, step_hours: float) -> None:
    for row in trace.rows:
        supply = row.gen_kw * step_hours + row.bulk_kwh + row.discharged_kwh
        use = row.delivered_kwh + row.charged_kwh + row.curtailed_kwh
        assert supply == pytest.approx(use, rel=1e-9, abs=1e-12)
        assert row.delivered_kwh + row.unmet_kwh == pytest.approx(row.demand_kw * step_hours, rel=1e-9, abs=1e-12)
        assert row.storage_kwh >= 0.0


def test_deficit_beyond_storage_becomes_unmet_demand() -> None:
    community = _community(storage=0.5)
    actions = step_llmu(community, 10.0, 4.0, 100.0, step_seconds=QUARTER_HOUR, bulk=BulkPolicy())
    assert actions.discharged_kwh == pytest.approx(0.5)
    assert actions.unmet_kwh == pytest.approx(1.0)
    assert actions.storage_kwh == 0.0
    assert actions.balance_error() == pytest.approx(0.0, abs=1e-12)


def test_request_fires_when_forecast_equals_threshold() -> None:
    community = _community(storage=10.0, s_q=10.0, lam=4.0)
    actions = step_llmu(community, 5.0, 5.0, 6.0, step_seconds=QUARTER_HOUR, bulk=BulkPolicy())
    assert actions.bulk_requested_kwh == pytest.approx(4.0)
    assert community.pending_bulk_kwh == pytest.approx(4.0)

    following = step_llmu(community, 5.0, 5.0, 20.0, step_seconds=QUARTER_HOUR, bulk=BulkPolicy())
    assert following.bulk_delivered_kwh == pytest.approx(4.0)
    assert following.bulk_requested_kwh == 0.0
    assert following.storage_kwh == pytest.approx(14.0)


def test_surplus_charges_storage_without_request() -> None:
    community = _community(storage=8.0)
    actions = step_llmu(community, 0.0, 6.0, 9.5, step_seconds=QUARTER_HOUR, bulk=BulkPolicy())
    assert actions.charged_kwh == pytest.approx(1.5)
    assert actions.delivered_kwh == 0.0
    assert actions.storage_kwh == pytest.approx(9.5)
    assert actions.bulk_requested_kwh == 0.0


def test_surplus_above_capacity_is_curtailed() -> None:
    community = _community(storage=9.0, capacity_kwh=10.0)
    actions = step_llmu(community, 2.0, 10.0, 12.0, step_seconds=QUARTER_HOUR, bulk=BulkPolicy())
    assert actions.charged_kwh == pytest.approx(1.0)
    assert actions.curtailed_kwh == pytest.approx(1.0)
    assert actions.storage_kwh == pytest.approx(10.0)
    assert actions.balance_error() == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    ("policy", "granted"),
    [(BulkPolicy("unbounded"), 7.0), (BulkPolicy("capped", max_kw=2.0), 0.5), (BulkPolicy("disabled"), 0.0)],
)
def test_bulk_policy_clamps_requests(policy: BulkPolicy, granted: float) -> None:
    community = _community(storage=10.0, s_q=10.0, lam=4.0)
    actions = step_llmu(community, 5.0, 5.0, 3.0, step_seconds=QUARTER_HOUR, bulk=policy)
    assert actions.bulk_requested_kwh == pytest.approx(granted)


def test_step_rejects_invalid_power() -> None:
    with pytest.raises(ValueError, match="demand_now must be a finite non-negative power"):
        _ = step_llmu(_community(), -1.0, 1.0, 5.0, step_seconds=QUARTER_HOUR, bulk=BulkPolicy())
    with pytest.raises(ValueError, match="gen_now must be a finite non-negative power"):
        _ = step_llmu(_community(), 1.0, float("nan"), 5.0, step_seconds=QUARTER_HOUR, bulk=BulkPolicy())


def test_policy_and_community_validation() -> None:
    with pytest.raises(ValueError, match="capped bulk policy needs a positive max_kw"):
        _ = BulkPolicy("capped")
    with pytest.raises(ValueError, match="unknown bulk policy 'free'"):
        _ = BulkPolicy("free")
    with pytest.raises(ValueError, match=r"community 1: lambda must lie in \[0, s_q\]"):
        _ = _community(s_q=5.0, lam=6.0)


def test_project_storage_adds_forecast_imbalance() -> None:
    community = _community(storage=10.0, demand_history=[8.0, 8.0], generation_history=[4.0, 4.0])
    assert project_storage(community, 8.0, 4.0, step_seconds=QUARTER_HOUR) == pytest.approx(8.0)
    assert project_storage(community, 8.0, 4.0, step_seconds=QUARTER_HOUR, lookahead=3) == pytest.approx(6.0)


def test_project_storage_falls_back_to_last_value_on_short_history() -> None:
    community = _community(storage=10.0)
    community.demand_model = DiffArModel(2, (0.5, 0.1), 1.0)
    community.observe(8.0, 4.0)
    assert len(community.demand_history) == 1
    assert project_storage(community, 8.0, 4.0, step_seconds=QUARTER_HOUR) == pytest.approx(8.0)


def test_constant_balanced_series_keep_storage_untouched() -> None:
    config = SimConfig(step_seconds=QUARTER_HOUR, horizon_steps=50, bulk=BulkPolicy("unbounded"))
    communities = [_community(storage=10.0), _community(storage=5.0, s_q=5.0, lam=1.0, q=2)]
    flat = {1: np.full(50, 12.0), 2: np.full(50, 3.0)}

    trace = run_simulation(config, communities, flat, flat)

    assert len(trace.rows) == 100
    assert all(row.storage_kwh == pytest.approx(10.0) for row in trace.for_community(1))
    assert all(row.storage_kwh == pytest.approx(5.0) for row in trace.for_community(2))
    assert trace.total("bulk_requested_kwh") == 0.0
    assert empirical_adequacy(trace, 1) == 1.0
    assert communities[0].storage_kwh == 10.0
    assert len(communities[0].demand_history) == 0


def test_run_simulation_validates_series() -> None:
    config = SimConfig(step_seconds=QUARTER_HOUR, horizon_steps=10)
    with pytest.raises(ValueError, match="shorter than the horizon"):
        _ = run_simulation(config, [_community()], {1: np.ones(9)}, {1: np.ones(10)})
    with pytest.raises(ValueError, match="generation series missing for community 1"):
        _ = run_simulation(config, [_community()], {1: np.ones(10)}, {2: np.ones(10)})
    with pytest.raises(ValueError, match="horizon_steps must be at least 1"):
        _ = SimConfig(step_seconds=QUARTER_HOUR, horizon_steps=0)


def test_runs_are_deterministic_and_balanced() -> None:
    scenario = _deficit_scenario({"kind": "capped", "max_kw": 2.0})
    first = run_seed(scenario, 3)
    second = run_seed(scenario, 3)
    assert first.rows == second.rows
    assert run_seed(scenario, 4).rows != first.rows
    _assert_balanced(first, QUARTER_HOUR / 3600)


def test_bulk_backstop_reduces_unmet_demand() -> None:
    unmet = {
        kind: run_seed(_deficit_scenario(bulk), 11).total("unmet_kwh")
        for kind, bulk in (
            ("unbounded", {"kind": "unbounded"}),
            ("capped", {"kind": "capped", "max_kw": 2.0}),
            ("disabled", {"kind": "disabled"}),
        )
    }
    assert unmet["unbounded"] <= unmet["capped"] <= unmet["disabled"]
    assert unmet["disabled"] > 0.0
    assert unmet["unbounded"] == 0.0


def test_balanced_noise_without_bulk_breaches_eventually() -> None:
    scenario = _scenario(
        horizon_steps=672,
        communities=[
            {
                "q": 1,
                "s_q": 10.0,
                "lambda": 0.5,
                "demand": {"profile": "flat", "base_kw": 20.0, "noise_sigma": 1.0},
                "generation": {"profile": "flat", "base_kw": 20.0, "noise_sigma": 1.0},
            }
        ],
    )
    breaches = [not all(row.adequate for row in run_seed(scenario, seed).rows) for seed in range(3)]
    assert any(breaches)


def test_prefix_adequacy_uses_running_minimum() -> None:
    config = SimConfig(step_seconds=QUARTER_HOUR, horizon_steps=3)

    def trace(flags: list[bool]) -> SimTrace:
        rows = [TraceRow(1, tau, 1.0, 1.0, 5.0, 0.0, 0.0, 5.0, flag) for tau, flag in enumerate(flags)]
        return SimTrace(config, rows)

    assert prefix_adequacy(trace([True, False, True]), 1).tolist() == [1.0, 0.0, 0.0]
    assert empirical_adequacy(trace([True, False, True]), 1) == pytest.approx(1 / 3)
    assert empirical_adequacy(trace([False, True, True]), 1) == 0.0
    assert empirical_adequacy(trace([True, True, True]), 1) == 1.0
    with pytest.raises(ValueError, match="trace has no rows for community 2"):
        _ = prefix_adequacy(trace([True]), 2)


def test_trace_csv_columns(tmp_path: Path) -> None:
    trace = run_seed(_scenario(horizon_steps=8), 0)
    path = tmp_path / "trace.csv"
    trace.write_csv(path)
    frame = pd.read_csv(path)
    assert tuple(frame.columns) == TRACE_COLUMNS
    assert len(frame) == 8
    assert set(frame["adequate"]) <= {0, 1}


def test_synth_process_shapes() -> None:
    flat = synth_process("flat", 7.0, 3.0, (), 0.0, 96, seed=0)
    assert np.all(flat == 7.0)

    daily = synth_process("daily-sinusoid", 10.0, 4.0, (), 0.0, 96, seed=0)
    peak_hour = int(np.argmax(daily)) * QUARTER_HOUR / 3600
    assert 17.0 <= peak_hour <= 21.0

    noisy = synth_process("flat", 1.0, 0.0, (0.8,), 5.0, 2_000, seed=1)
    assert noisy.min() >= 0.0
    assert np.array_equal(noisy, synth_process("flat", 1.0, 0.0, (0.8,), 5.0, 2_000, seed=1))

    with pytest.raises(ValueError, match="unknown profile 'weekly'"):
        _ = synth_process("weekly", 1.0, 0.0, (), 0.0, 10, seed=0)


def test_synth_integrated_process_recovers_phi() -> None:
    series = synth_process("flat", 5_000.0, 0.0, (0.5,), 1.0, 10_000, seed=2, integrated=True)
    assert fit_diff_ar(series, 1).phi[0] == pytest.approx(0.5, abs=0.05)


def test_scenario_loading(tmp_path: Path) -> None:
    path = tmp_path / "scenario.json"
    payload = {
        "step_seconds": 900,
        "horizon_steps": 10,
        "bulk": {"kind": "capped", "max_kw": 3.0},
        "order": {"demand": 1, "generation": 3},
        "communities": [
            {
                "q": 4,
                "s_q": 12.0,
                "lambda": 2.0,
                "demand": {"profile": "daily-sinusoid", "base_kw": 5.0, "amplitude_kw": 2.0, "ar_phi": [0.3]},
                "generation": {"profile": "flat", "base_kw": 5.0},
            }
        ],
    }
    path.write_text(json.dumps(payload), encoding="utf-8")

    scenario = load_scenario(path)

    assert scenario.bulk == BulkPolicy("capped", 3.0)
    assert (scenario.demand_order, scenario.generation_order) == (1, 3)
    assert scenario.communities[0].lam == 2.0
    assert scenario.communities[0].demand.ar_phi == (0.3,)

    path.write_text(json.dumps({**payload, "steps": 3}), encoding="utf-8")
    with pytest.raises(ValueError, match="unknown scenario fields: steps"):
        _ = load_scenario(path)


def test_scenario_rejects_duplicate_communities() -> None:
    community = _scenario().communities[0]
    with pytest.raises(ValueError, match="duplicate community ids"):
        _ = Scenario(step_seconds=900, horizon_steps=4, communities=(community, community))


def test_build_run_falls_back_on_degenerate_warmup(caplog: pytest.LogCaptureFixture) -> None:
    scenario = _scenario(
        communities=[
            {
                "q": 2,
                "s_q": 5.0,
                "lambda": 1.0,
                "demand": {"profile": "flat", "base_kw": 3.0},
                "generation": {"profile": "flat", "base_kw": 3.0, "noise_sigma": 0.2},
            }
        ]
    )
    with caplog.at_level(logging.WARNING, logger="gridcast.simulation.scenario"):
        config, communities, demand, generation = build_run(scenario, 5)

    assert "q2 demand: falling back to a random-walk forecaster" in caplog.text
    assert communities[0].demand_model == DiffArModel.random_walk(2)
    assert communities[0].generation_model.phi != (0.0, 0.0)
    assert len(communities[0].demand_history) == 3
    assert demand[2].shape == generation[2].shape == (config.horizon_steps,)
    assert config.seed == 5


@pytest.mark.parametrize("workers", [1, 3])
def test_sweep_writes_one_record_per_seed(workers: int, tmp_path: Path) -> None:
    scenario = _scenario(horizon_steps=24)
    with RecordStore(DirectoryBackend(tmp_path), namespace="sweep") as store:
        frame = sweep_seeds(scenario, range(4), store=store, workers=workers)
        assert list(store) == ["seed0", "seed1", "seed2", "seed3"]
        assert store.fetch("seed2")[0]["seed"] == 2

    assert frame["seed"].tolist() == [0, 1, 2, 3]
    assert frame.equals(sweep_seeds(scenario, range(4)))


@pytest.mark.slow
def test_empirical_adequacy_respects_the_bound() -> None:
    scenario = _scenario(horizon_steps=672)
    frame = sweep_seeds(scenario, range(200), workers=4)
    noise = NoiseParams.from_step_noise(1.0, 1.0, QUARTER_HOUR / 3600)
    bound = adequacy_lower_bound(23.6, noise.sigma2, 672 * QUARTER_HOUR / 3600)

    assert bound == pytest.approx(0.99, abs=0.005)
    assert frame["adequate_to_end"].mean() >= bound - 0.02


def _tight_threshold_scenario(bulk: dict[str, Any]) -> Scenario:
    return _scenario(
        horizon_steps=672,
        bulk=bulk,
        communities=[
            {
                "q": 1,
                "s_q": 10.0,
                "lambda": 2.0,
                "demand": {"profile": "flat", "base_kw": 20.0, "noise_sigma": 1.0},
                "generation": {"profile": "flat", "base_kw": 20.0, "noise_sigma": 1.0},
            }
        ],
    )


@pytest.mark.slow
def test_unbounded_bulk_keeps_a_tight_threshold_adequate() -> None:
    backed = sweep_seeds(_tight_threshold_scenario({"kind": "unbounded"}), range(20), workers=4)
    unbacked = sweep_seeds(_tight_threshold_scenario({"kind": "disabled"}), range(20), workers=4)

    assert backed["bulk_kwh"].sum() > 0
    assert (backed["unmet_kwh"] == 0.0).all()
    assert backed["step_adequacy"].mean() >= 0.99
    assert unbacked["step_adequacy"].mean() < 0.9
    assert unbacked["adequate_to_end"].mean() <= 0.5
