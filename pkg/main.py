import argparse
import logging
import sys

from app.config import config
from app.core.errors import (
    OverloadError,
    ScenarioSemanticError,
    ScenarioSyntaxError,
    ScenarioValidationError,
)
from app.handlers import analyze, compare, simulate, sweep, validate


EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INTERNAL = 2

# failures of the scenario itself rather than of the tool
SCENARIO_ERRORS = (
    ScenarioSyntaxError,
    ScenarioSemanticError,
    ScenarioValidationError,
    OverloadError,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mscs",
        description="Mini-slot carrier sensing MAC: analytic model, simulator and cross-validation.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for handler in (validate, analyze, simulate, compare, sweep):
        handler.register(subparsers)
    return parser


def configure_logging(args: argparse.Namespace) -> None:
    level = config.log_level.upper()
    if args.verbose:
        level = "DEBUG"
    elif args.quiet:
        level = "WARNING"
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args)
    try:
        return args.handler(args)
    except SCENARIO_ERRORS as exc:
        sys.stderr.write(str(exc) + "\n")
        return EXIT_FAILED
    except Exception as exc:
        logging.getLogger(__name__).exception("cli.failed command=%s", args.command)
        sys.stderr.write(str(exc) + "\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
