import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal

from app.analytic.report import AnalyticReport
from app.core.errors import ResultsWriteError
from app.metrics.compare import ComparisonReport
from app.metrics.summary import Estimate, SimReport
from app.utils.formatting import format_number, parse_number


COLUMNS = (
    "scenario_id",
    "quantity",
    "device_or_slot",
    "analytic",
    "simulated",
    "ci_low",
    "ci_high",
    "rel_err",
    "verdict",
)
NUMERIC = ("analytic", "simulated", "ci_low", "ci_high", "rel_err")


@dataclass(slots=True)
class ResultRow:
    scenario_id: str
    quantity: str
    device_or_slot: str
    analytic: float | None = None
    simulated: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    rel_err: float | None = None
    verdict: str = ""
    # leading columns such as a sweep grid point and its axis values
    labels: dict = field(default_factory=dict)

    def cells(self) -> dict[str, str]:
        row = {key: str(value) for key, value in self.labels.items()}
        for column in COLUMNS:
            value = getattr(self, column)
            row[column] = format_number(value) if column in NUMERIC else str(value)
        return row


def analytic_rows(report: AnalyticReport) -> list[ResultRow]:
    rows = []

    def add(quantity: str, subject: str, value: float) -> None:
        rows.append(ResultRow(report.scenario_id, quantity, subject, analytic=value))

    for device_id, device in sorted(report.devices.items()):
        subject = f"device:{device_id}"
        add("adf", subject, device.adf)
        add("ad", subject, float(device.ad_ticks))
        add("base_delay", subject, float(device.base_delay_ticks))
        add("delay", subject, float(device.delay_ticks))
        add("collision_probability", subject, device.collision_probability)
    for slot, analysis in sorted(report.slots.items()):
        add("idle_probability", f"slot:{slot}", analysis.idle_probability)
        add("throughput", f"slot:{slot}", analysis.throughput)
    add("slot_length", "global", report.slot_ticks)
    add("efficiency", "global", report.efficiency)
    if report.expected_frame is not None:
        add("frame_length", "frame", report.expected_frame)
        add("busy_slots", "frame", report.frame.busy_slots)
    return rows


def _simulated(scenario_id: str, quantity: str, subject: str, estimate: Estimate) -> ResultRow:
    return ResultRow(
        scenario_id,
        quantity,
        subject,
        simulated=estimate.mean,
        ci_low=estimate.ci_low,
        ci_high=estimate.ci_high,
        verdict="" if estimate.reliable else "insufficient",
    )


def sim_rows(report: SimReport) -> list[ResultRow]:
    rows = []
    sid = report.scenario_id
    for device_id, device in sorted(report.devices.items()):
        subject = f"device:{device_id}"
        rows.append(_simulated(sid, "adf", subject, device.adf))
        rows.append(_simulated(sid, "ad", subject, device.ad_ticks))
        rows.append(_simulated(sid, "delay", subject, device.delay_ticks))
        rows.append(_simulated(sid, "collision_probability", subject, device.collision_probability))
        rows.append(ResultRow(sid, "replacement_rate", subject, simulated=device.replacement_rate))
        rows.append(ResultRow(sid, "collided", subject, simulated=device.collided))
    for slot, estimate in sorted(report.slots.items()):
        rows.append(_simulated(sid, "idle_probability", f"slot:{slot}", estimate.idle_fraction))
        rows.append(ResultRow(sid, "throughput", f"slot:{slot}", simulated=estimate.throughput))
    if report.slot_ticks is not None:
        rows.append(_simulated(sid, "slot_length", "global", report.slot_ticks))
        rows.append(_simulated(sid, "frame_length", "frame", report.frame_ticks))
    rows.append(ResultRow(sid, "collision_events", "global", simulated=report.collision_events))
    return rows


def comparison_rows(report: ComparisonReport) -> list[ResultRow]:
    return [
        ResultRow(
            report.scenario_id,
            row.quantity,
            row.subject,
            analytic=row.analytic,
            simulated=row.simulated,
            ci_low=row.ci_low,
            ci_high=row.ci_high,
            rel_err=row.rel_err,
            verdict=row.verdict,
        )
        for row in report.rows
    ]


def _header(rows: list[ResultRow]) -> list[str]:
    labels: list[str] = []
    for row in rows:
        for key in row.labels:
            if key not in labels:
                labels.append(key)
    return labels + list(COLUMNS)


def _json_value(value):
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return None
        return float(format_number(value))
    return value


def emit_results(
    rows: Iterable[ResultRow], path: Path, format: Literal["csv", "text"] = "csv"
) -> Path:
    """
    Writes result rows as CSV (one row per quantity) or as structured JSON text.

    Column order is fixed; numbers carry 9 significant digits.
    """
    rows = list(rows)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if format == "csv":
            with path.open("w", encoding="utf-8", newline="") as handle:
                writer = csv.DictWriter(
                    handle,
                    fieldnames=_header(rows),
                    quoting=csv.QUOTE_MINIMAL,
                    lineterminator="\n",
                )
                writer.writeheader()
                for row in rows:
                    writer.writerow(row.cells())
        else:
            payload = [
                {
                    **row.labels,
                    **{column: _json_value(getattr(row, column)) for column in COLUMNS},
                }
                for row in rows
            ]
            path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ResultsWriteError(path, exc) from exc
    return path


def read_results_csv(path: Path) -> list[dict]:
    """Rows of an emitted CSV with the numeric columns parsed back to floats."""
    with path.open(encoding="utf-8", newline="") as handle:
        rows = []
        for record in csv.DictReader(handle):
            for column in NUMERIC:
                if column in record:
                    record[column] = parse_number(record[column])
            rows.append(record)
    return rows
