import argparse
from pathlib import Path

from app.analytic.report import analytic_report
from app.handlers.common import add_common_arguments, echo, load_scenario, output_directory, record_run
from app.handlers.render_helpers import build_comparison_text
from app.handlers.simulate import simulate_scenario
from app.io.results import comparison_rows, emit_results
from app.lexicon.en import LexiconEN
from app.metrics.compare import compare, load_profile
from app.sim.replications import replication_seeds


def cmd_compare(args: argparse.Namespace) -> int:
    """Analysis against simulation; exit 0 iff every mandatory quantity passes."""
    scenario = load_scenario(args)
    profile = load_profile(args.profile)
    analytic = analytic_report(scenario)
    simulated = simulate_scenario(scenario, args, args.export_log)
    report = compare(analytic, simulated, profile)

    suffix = "csv" if args.format == "csv" else "json"
    path = emit_results(
        comparison_rows(report), output_directory(args) / f"comparison.{suffix}", args.format
    )
    record_run(
        args,
        "compare",
        scenario,
        [path],
        seeds=replication_seeds(scenario),
        profile=profile.name,
    )
    echo(build_comparison_text(scenario, report))
    echo(LexiconEN.RESULTS_WRITTEN.format(path=path))
    return 0 if report.passed else 1


def register(subparsers) -> None:
    parser = subparsers.add_parser("compare", help="compare analysis with simulation")
    add_common_arguments(parser)
    parser.add_argument("--format", choices=("csv", "text"), default="csv")
    parser.add_argument(
        "--profile",
        default=None,
        help="tolerance profile: shipped name (default, strict) or path to a YAML profile",
    )
    parser.add_argument("--export-log", type=Path, default=None, metavar="PATH")
    parser.set_defaults(handler=cmd_compare)
