import argparse
import logging

from app.analytic.report import analytic_report
from app.core.errors import MacModelError
from app.core.validation import validate_scenario
from app.handlers.common import add_common_arguments, echo, load_scenario
from app.handlers.render_helpers import build_validation_text


LOGGER = logging.getLogger(__name__)


def cmd_validate(args: argparse.Namespace) -> int:
    """Prints the validation report; exit 0 iff there are no hard errors."""
    scenario = load_scenario(args, validate=False)
    report = validate_scenario(scenario)
    if report.ok:
        try:
            # analytic delays and collision estimates add the soft QoS checks
            report = validate_scenario(scenario, analytic_report(scenario))
        except MacModelError as exc:
            report.error("analytic", str(exc))
    echo(build_validation_text(scenario, report))
    return 0 if report.ok else 1


def register(subparsers) -> None:
    parser = subparsers.add_parser("validate", help="check a scenario file")
    add_common_arguments(parser)
    parser.set_defaults(handler=cmd_validate)
