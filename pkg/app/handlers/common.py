import argparse
import sys
from pathlib import Path

from app.config import config
from app.core.model import Scenario
from app.io.manifest import RunManifest, write_manifest
from app.io.scenario_file import parse


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", type=Path, help="scenario file (.scn)")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="dotted-key override applied before validation, e.g. run.horizon_slots=1000; repeatable",
    )
    parser.add_argument(
        "--output-dir",
        type=Path,
        default=None,
        help="directory for results and the run manifest (default: MSCS_OUTPUT_DIR or ./results)",
    )
    parser.add_argument(
        "--lenient",
        action="store_true",
        help="warn about unknown scenario keys instead of rejecting them",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="parallel worker processes for replications and sweep points (default: MSCS_WORKERS)",
    )
    parser.add_argument("--verbose", action="store_true", help="log debug records to standard error")
    parser.add_argument("--quiet", action="store_true", help="log warnings only and hide progress bars")


def output_directory(args: argparse.Namespace) -> Path:
    return args.output_dir if args.output_dir is not None else config.output_dir


def load_scenario(args: argparse.Namespace, *, validate: bool = True) -> Scenario:
    return parse(
        args.scenario,
        overrides=args.override,
        strict=not args.lenient,
        validate=validate,
    )


def progress_enabled(args: argparse.Namespace) -> bool:
    return config.progress and not args.quiet and sys.stderr.isatty()


def record_run(
    args: argparse.Namespace,
    command: str,
    scenario: Scenario,
    outputs: list[Path],
    **extra,
) -> Path:
    manifest = RunManifest(
        command=command,
        scenario_id=scenario.identity(),
        scenario_name=scenario.name,
        source=str(args.scenario),
        overrides=list(args.override),
        outputs=[path.name for path in outputs],
        **extra,
    )
    return write_manifest(output_directory(args), manifest, scenario)


def echo(text: str) -> None:
    sys.stdout.write(text + "\n")
