"""Interface for ``python -m gridcast``."""

from __future__ import annotations

import logging
import time
from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import TYPE_CHECKING

from . import commands
from ._version import version
from .adequacy import MonteCarloSettings
from .timegrid import QUANTITIES, GridConfig, load_config


if TYPE_CHECKING:
    from collections.abc import Sequence


__all__ = ["build_parser", "main", "run"]

logger = logging.getLogger("gridcast")


def _floats(text: str) -> list[float]:
    return [float(item) for item in text.split(",") if item.strip()]


def build_parser() -> ArgumentParser:
    """Argument parser for the CLI."""
    parser = ArgumentParser(prog="gridcast", description=__doc__)
    _ = parser.add_argument("-v", "--version", action="version", version=version)
    _ = parser.add_argument("--config", type=Path, help="grid configuration JSON")
    _ = parser.add_argument("--seed", type=int, help="top-level random seed")
    _ = parser.add_argument("--out-dir", type=Path, default=Path("out"), help="output directory (default: out)")
    _ = parser.add_argument(
        "--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="logging level"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="validate observations and write the normalized dataset")
    _ = ingest.add_argument("csv", type=Path)

    longterm = sub.add_parser("fit-longterm", help="fit the per-cell maximum-likelihood regressions")
    _ = longterm.add_argument("dataset", type=Path)
    _ = longterm.add_argument("--quantity", action="append", choices=QUANTITIES, dest="quantities")
    _ = longterm.add_argument("--workers", type=int, default=1)

    realtime = sub.add_parser("fit-realtime", help="fit the real-time forecasters")
    _ = realtime.add_argument("dataset", type=Path)
    _ = realtime.add_argument("--demand-order", type=int, default=2)
    _ = realtime.add_argument("--generation-order", type=int, default=2)
    _ = realtime.add_argument("--kind", choices=["diff_ar", "ar"], default="diff_ar")

    forecast = sub.add_parser("forecast", help="forecast from a stored model record")
    _ = forecast.add_argument("model", help="model record JSON file, or a record key such as realtime:demand:q1")
    _ = forecast.add_argument("--horizon", type=int, default=1)
    source = forecast.add_mutually_exclusive_group()
    _ = source.add_argument("--history", type=_floats, default=[], help="comma-separated values, oldest first")
    _ = source.add_argument("--dataset", type=Path, help="take the history from a dataset CSV")
    _ = forecast.add_argument("--community", type=int, default=1)
    _ = forecast.add_argument("--quantity", choices=QUANTITIES, default="demand")
    _ = forecast.add_argument(
        "--features", type=_floats, action="append", default=[], help="x1,x2,x3,x4 of one cell (repeatable)"
    )
    _ = forecast.add_argument("--longterm", help="long-term model record (file or key) providing the drift")

    adequacy = sub.add_parser("adequacy", help="tabulate adequacy lower bounds")
    _ = adequacy.add_argument("--lambdas", type=_floats, default=[0.5, 1.0, 2.0])
    _ = adequacy.add_argument("--sigma2s", type=_floats, default=[0.5, 1.0, 2.0])
    _ = adequacy.add_argument("--t-max", type=float, default=48.0)
    _ = adequacy.add_argument("--t-points", type=int, default=96)
    _ = adequacy.add_argument("--mc-paths", type=int, default=0, help="Monte Carlo paths (0 disables)")
    _ = adequacy.add_argument("--mc-steps", type=int, default=1_000)
    _ = adequacy.add_argument("--no-bridge", action="store_true", help="monitor crossings on the grid only")
    _ = adequacy.add_argument("--workers", type=int, default=1)

    simulate = sub.add_parser("simulate", help="simulate LLMU-operated communities")
    _ = simulate.add_argument("scenario", type=Path)
    _ = simulate.add_argument("--sweep", type=int, default=0, help="also run this many consecutive seeds")
    _ = simulate.add_argument("--workers", type=int, default=1)
    _ = simulate.add_argument("--models", type=Path, help="directory of stored real-time models")
    return parser


def _require_config(options: Namespace) -> GridConfig:
    if options.config is None:
        msg = f"{options.command} needs --config"
        raise ValueError(msg)
    return load_config(options.config)


def _dispatch(options: Namespace) -> tuple[list[str | Path], list[Path]]:
    """Run the selected command; return its inputs and outputs."""
    out = options.out_dir
    match options.command:
        case "ingest":
            return [options.csv], commands.cmd_ingest(options.csv, _require_config(options), out)
        case "fit-longterm":
            quantities = options.quantities or list(QUANTITIES)
            written = commands.cmd_fit_longterm(
                options.dataset, _require_config(options), out, quantities, workers=options.workers
            )
            return [options.dataset], written
        case "fit-realtime":
            written = commands.cmd_fit_realtime(
                options.dataset,
                _require_config(options),
                out,
                options.demand_order,
                options.generation_order,
                kind=options.kind,
            )
            return [options.dataset], written
        case "forecast":
            inputs: list[str | Path] = [options.model]
            history = options.history
            if options.dataset is not None:
                inputs.append(options.dataset)
                history = commands.history_from_dataset(
                    options.dataset, _require_config(options), options.community, options.quantity
                )
            if options.longterm is not None:
                inputs.append(options.longterm)
            written = commands.cmd_forecast(
                options.model,
                out,
                horizon=options.horizon,
                history=history,
                features=options.features,
                longterm_path=options.longterm,
            )
            return inputs, written
        case "adequacy":
            monte_carlo = None
            if options.mc_paths > 0:
                monte_carlo = MonteCarloSettings(
                    n_paths=options.mc_paths,
                    n_steps=options.mc_steps,
                    seed=options.seed or 0,
                    bridge=not options.no_bridge,
                    workers=options.workers,
                )
            written = commands.cmd_adequacy(
                options.lambdas, options.sigma2s, options.t_max, options.t_points, out, monte_carlo
            )
            return [], written
        case "simulate":
            written = commands.cmd_simulate(
                options.scenario,
                out,
                seed=options.seed,
                sweep=options.sweep,
                workers=options.workers,
                models_dir=options.models,
            )
            inputs = [options.scenario] if options.models is None else [options.scenario, options.models]
            return inputs, written
        case _:
            msg = f"unknown command: {options.command}"
            raise ValueError(msg)


def main(args: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit code."""
    options = build_parser().parse_args(args)
    logging.basicConfig(level=options.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        inputs, outputs = _dispatch(options)
    except (ValueError, TypeError, KeyError, OSError) as error:
        logger.error("%s failed: %s", options.command, error)  # noqa: TRY400
        return 1
    manifest = commands.RunManifest(
        command=options.command,
        config_path=None if options.config is None else str(options.config),
        inputs=[str(path) for path in inputs],
        seed=options.seed,
        outputs=[str(path) for path in outputs],
        version=version,
        duration_seconds=time.perf_counter() - started,
    )
    _ = manifest.write(options.out_dir)
    return 0


def run() -> None:
    """Console-script entry point."""
    raise SystemExit(main())


if __name__ == "__main__":
    run()
