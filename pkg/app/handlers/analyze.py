import argparse

from app.analytic.report import analytic_report
from app.core.validation import validate_scenario
from app.handlers.common import add_common_arguments, echo, load_scenario, output_directory, record_run
from app.handlers.render_helpers import build_analytic_text
from app.io.results import analytic_rows, emit_results
from app.lexicon.en import LexiconEN


def cmd_analyze(args: argparse.Namespace) -> int:
    scenario = load_scenario(args)
    report = analytic_report(scenario)
    validate_scenario(scenario, report)

    suffix = "csv" if args.format == "csv" else "json"
    path = emit_results(
        analytic_rows(report), output_directory(args) / f"analytic.{suffix}", args.format
    )
    record_run(
        args,
        "analyze",
        scenario,
        [path],
        analysis={"prefactor": report.prefactor, "collision_rate": report.collision_rate},
    )
    echo(build_analytic_text(scenario, report))
    echo(LexiconEN.RESULTS_WRITTEN.format(path=path))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("analyze", help="evaluate the analytic model")
    add_common_arguments(parser)
    parser.add_argument("--format", choices=("csv", "text"), default="csv")
    parser.set_defaults(handler=cmd_analyze)
