"""
Parameter sweeps over scenario keys.

An axis reads `path = logspace(a,b,n)`, `path = linspace(a,b,n)` or
`path = [v1, v2, ...]`; several axes span their cartesian product. Points
whose scenario or solvers fail are recorded as skipped with the reason.
"""

import argparse
import copy
import itertools
import logging
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import yaml
from tqdm import tqdm

from app.analytic.report import analytic_report
from app.config import config
from app.core.errors import (
    InsufficientData,
    NonConvergenceError,
    OverloadError,
    ScenarioSemanticError,
    ScenarioValidationError,
    StateSpaceOverflow,
)
from app.handlers.common import add_common_arguments, echo, output_directory, progress_enabled
from app.io.manifest import RunManifest, write_manifest
from app.io.results import ResultRow, analytic_rows, comparison_rows, emit_results
from app.io.scenario_file import apply_overrides, build_scenario, parse_document, read_source
from app.lexicon.en import LexiconEN
from app.metrics.compare import compare, load_profile
from app.metrics.summary import summarize
from app.sim.replications import replication_seeds, run_replications


LOGGER = logging.getLogger(__name__)

# Failures confined to one grid point; anything else aborts the sweep.
POINT_ERRORS = (
    ScenarioSemanticError,
    ScenarioValidationError,
    OverloadError,
    NonConvergenceError,
    InsufficientData,
    StateSpaceOverflow,
)

_RANGE = re.compile(r"^(logspace|linspace)\(\s*([^,]+),\s*([^,]+),\s*(\d+)\s*\)$")


@dataclass(frozen=True, slots=True)
class Axis:
    path: str
    values: tuple


def parse_axis(spec: str) -> Axis:
    path, separator, expression = spec.partition("=")
    path, expression = path.strip(), expression.strip()
    if not separator or not path:
        raise ScenarioSemanticError(f"axis {spec!r} is not path=values", field="axis")
    match = _RANGE.match(expression)
    if match:
        kind, start, stop, count = match.groups()
        space = np.logspace if kind == "logspace" else np.linspace
        values = tuple(float(value) for value in space(float(start), float(stop), int(count)))
        return Axis(path, values)
    try:
        values = yaml.safe_load(expression)
    except yaml.YAMLError as exc:
        raise ScenarioSemanticError(str(exc), field="axis") from exc
    if not isinstance(values, list) or not values:
        raise ScenarioSemanticError(f"axis {spec!r} has no values", field="axis")
    return Axis(path, tuple(values))


def grid(axes: list[Axis]) -> list[dict]:
    return [
        {axis.path: value for axis, value in zip(axes, combo)}
        for combo in itertools.product(*(axis.values for axis in axes))
    ]


@dataclass(frozen=True, slots=True)
class PointJob:
    index: int
    point: dict
    data: dict
    strict: bool
    simulate: bool
    profile: str | None


def evaluate_point(job: PointJob) -> tuple[str, str, list[ResultRow]]:
    labels = {"point": job.index, **job.point}
    data = copy.deepcopy(job.data)
    try:
        apply_overrides(data, [f"{path}={value}" for path, value in job.point.items()])
        scenario = build_scenario(data, strict=job.strict)
        analytic = analytic_report(scenario)
        if job.simulate:
            counters, _ = run_replications(scenario, workers=1, progress=False)
            report = compare(analytic, summarize(counters), load_profile(job.profile))
            rows = comparison_rows(report)
            status = "pass" if report.passed else "fail"
        else:
            rows = analytic_rows(analytic)
            status = "analytic"
    except POINT_ERRORS as exc:
        LOGGER.warning("sweep.point.skipped index=%s reason=%s", job.index, exc)
        row = ResultRow("", "point", "grid", verdict="skipped", labels=labels)
        return "skipped", str(exc), [row]

    for row in rows:
        row.labels = labels
    return status, "", rows


def cmd_sweep(args: argparse.Namespace) -> int:
    axes = [parse_axis(spec) for spec in args.axis]
    points = grid(axes)
    data, marks = parse_document(read_source(args.scenario))
    apply_overrides(data, args.override)
    base = build_scenario(copy.deepcopy(data), marks, strict=not args.lenient, validate=False)
    jobs = [
        PointJob(index, point, data, not args.lenient, not args.analytic_only, args.profile)
        for index, point in enumerate(points)
    ]
    echo(
        LexiconEN.SWEEP_HEADER.format(
            name=base.name or "-",
            points=len(points),
            axes=", ".join(axis.path for axis in axes),
        )
    )

    workers = config.workers if args.workers is None else args.workers
    bar = tqdm(total=len(jobs), disable=not progress_enabled(args), desc="sweep")
    outcomes = []
    try:
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for outcome in pool.map(evaluate_point, jobs):
                    outcomes.append(outcome)
                    bar.update(1)
        else:
            for job in jobs:
                outcomes.append(evaluate_point(job))
                bar.update(1)
    finally:
        bar.close()

    rows = []
    manifest_grid = []
    for job, (status, reason, point_rows) in zip(jobs, outcomes):
        rows.extend(point_rows)
        manifest_grid.append(
            {
                "index": job.index,
                **job.point,
                "scenario_id": point_rows[0].scenario_id if point_rows else "",
                "status": status,
                "reason": reason,
            }
        )
        echo(LexiconEN.SWEEP_POINT.format(index=job.index, values=job.point, status=status))

    directory = output_directory(args)
    path = emit_results(rows, directory / "sweep.csv")
    write_manifest(
        directory,
        RunManifest(
            command="sweep",
            scenario_id=base.identity(),
            scenario_name=base.name,
            source=str(args.scenario),
            seeds=replication_seeds(base),
            overrides=list(args.override),
            profile=args.profile,
            axes=list(args.axis),
            grid=manifest_grid,
            outputs=[path.name],
        ),
        base,
    )
    echo(LexiconEN.SWEEP_DONE.format(path=path))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="evaluate a parameter grid")
    add_common_arguments(parser)
    parser.add_argument(
        "--axis",
        action="append",
        required=True,
        metavar="SPEC",
        help="grid axis, e.g. 'devices.*.lambda_per_s = logspace(0,2,5)'; repeatable",
    )
    parser.add_argument(
        "--analytic-only",
        action="store_true",
        help="skip simulation and emit analytic rows per grid point",
    )
    parser.add_argument("--profile", default=None)
    parser.set_defaults(handler=cmd_sweep)
