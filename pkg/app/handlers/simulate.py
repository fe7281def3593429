import argparse
from pathlib import Path

from app.core.model import Scenario
from app.handlers.common import (
    add_common_arguments,
    echo,
    load_scenario,
    output_directory,
    progress_enabled,
    record_run,
)
from app.handlers.render_helpers import build_sim_text
from app.io.results import emit_results, sim_rows
from app.lexicon.en import LexiconEN
from app.metrics.summary import SimReport, summarize
from app.sim.replications import replication_seeds, run_replications


def simulate_scenario(
    scenario: Scenario, args: argparse.Namespace, export_log: Path | None = None
) -> SimReport:
    counters, log = run_replications(
        scenario,
        workers=args.workers,
        progress=progress_enabled(args),
        record_first=export_log is not None,
    )
    if export_log is not None:
        log.to_jsonl(export_log)
        echo(LexiconEN.LOG_EXPORTED.format(path=export_log))
    return summarize(counters)


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args)
    report = simulate_scenario(scenario, args, args.export_log)

    suffix = "csv" if args.format == "csv" else "json"
    path = emit_results(
        sim_rows(report), output_directory(args) / f"simulation.{suffix}", args.format
    )
    outputs = [path] + ([args.export_log] if args.export_log else [])
    record_run(args, "simulate", scenario, outputs, seeds=replication_seeds(scenario))
    echo(build_sim_text(scenario, report))
    echo(LexiconEN.RESULTS_WRITTEN.format(path=path))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="run the slot-level simulator")
    add_common_arguments(parser)
    parser.add_argument("--format", choices=("csv", "text"), default="csv")
    parser.add_argument(
        "--export-log",
        type=Path,
        default=None,
        metavar="PATH",
        help="write the first replication's event log as JSON lines",
    )
    parser.set_defaults(handler=cmd_simulate)
