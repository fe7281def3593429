from app.analytic.report import AnalyticReport
from app.core.model import Scenario
from app.core.validation import ValidationReport
from app.lexicon.en import LexiconEN
from app.metrics.compare import ComparisonReport
from app.metrics.summary import SimReport
from app.utils.formatting import (
    format_interval,
    format_number,
    format_probability,
    format_table,
    format_us,
)


def build_validation_text(scenario: Scenario, report: ValidationReport) -> str:
    name = scenario.name or "-"
    if report.ok:
        lines = [LexiconEN.VALIDATION_OK.format(name=name, scenario_id=scenario.identity())]
    else:
        lines = [
            LexiconEN.VALIDATION_FAILED.format(
                name=name, scenario_id=scenario.identity(), count=len(report.errors)
            )
        ]
    for issue in report.issues:
        lines.append(
            LexiconEN.ISSUE_LINE.format(
                severity=issue.severity,
                code=issue.code,
                where=issue.where,
                message=issue.message,
            )
        )
    lines.append(LexiconEN.SLOT_LOADS_HEADER)
    if not report.slot_loads:
        lines.append(LexiconEN.NO_LOADED_SLOTS)
    for slot, load in sorted(report.slot_loads.items()):
        lines.append(LexiconEN.SLOT_LOAD_LINE.format(slot=slot, load=format_number(load, 6)))
    return "\n".join(lines)


def build_analytic_text(scenario: Scenario, report: AnalyticReport) -> str:
    lines = [
        LexiconEN.ANALYTIC_HEADER.format(
            name=scenario.name or "-", scenario_id=report.scenario_id
        ),
        format_table(
            ("device", "class", "slots", "minislot", "AD-F", "AD", "delay", "q_c"),
            (
                (
                    str(device.device_id),
                    device.priority.value,
                    ",".join(str(slot) for slot in device.slots),
                    str(device.minislot),
                    format_number(device.adf, 7),
                    format_us(device.ad_ticks),
                    format_us(device.delay_ticks),
                    format_probability(device.collision_probability),
                )
                for device in report.devices.values()
            ),
        ),
        format_table(
            ("slot", "solver", "idle", "throughput"),
            (
                (
                    str(slot.slot),
                    slot.solver,
                    format_probability(slot.idle_probability),
                    format_probability(slot.throughput),
                )
                for slot in report.slots.values()
                if slot.solver != "empty"
            ),
        ),
        LexiconEN.SLOT_LENGTH_LINE.format(
            slot=format_us(report.slot_ticks),
            frame=format_us(report.frame_ticks),
            efficiency=format_number(report.efficiency, 6),
        ),
    ]
    if report.frame is not None:
        lines.append(
            LexiconEN.FRAME_LENGTH_LINE.format(
                frame=format_us(report.frame.expected_ticks),
                busy=format_number(report.frame.busy_slots, 6),
            )
        )
    if any(slot.solver == "smsa" for slot in report.slots.values()):
        lines.append(
            LexiconEN.ANALYSIS_OPTIONS_LINE.format(
                prefactor=report.prefactor, collision_rate=report.collision_rate
            )
        )
    for warning in report.warnings:
        lines.append(LexiconEN.SOLVER_WARNING.format(message=warning))
    return "\n".join(lines)


def build_sim_text(scenario: Scenario, report: SimReport) -> str:
    lines = [
        LexiconEN.SIM_HEADER.format(
            name=scenario.name or "-",
            scenario_id=report.scenario_id,
            replications=report.replications,
            horizon=report.horizon_slots,
        ),
        format_table(
            ("device", "AD-F", "AD-F CI", "AD", "q_c", "replaced", "successes"),
            (
                (
                    str(device.device_id),
                    format_number(device.adf.mean, 7),
                    format_interval(device.adf.ci_low, device.adf.ci_high),
                    format_us(device.ad_ticks.mean),
                    format_probability(device.collision_probability.mean),
                    format_probability(device.replacement_rate),
                    str(device.successes),
                )
                for device in report.devices.values()
            ),
        ),
        LexiconEN.COLLISIONS_LINE.format(count=report.collision_events),
    ]
    if report.frame_ticks is not None:
        lines.append(
            LexiconEN.FRAME_ESTIMATE_LINE.format(
                frame=format_us(report.frame_ticks.mean),
                interval=format_interval(report.frame_ticks.ci_low, report.frame_ticks.ci_high),
            )
        )
    if report.insufficient:
        lines.append(LexiconEN.INSUFFICIENT_LINE.format(devices=report.insufficient))
    return "\n".join(lines)


def build_comparison_text(scenario: Scenario, report: ComparisonReport) -> str:
    lines = [
        LexiconEN.COMPARE_HEADER.format(
            name=scenario.name or "-", scenario_id=report.scenario_id, profile=report.profile
        ),
        format_table(
            ("quantity", "subject", "analytic", "simulated", "CI", "rel_err", "verdict"),
            (
                (
                    row.quantity,
                    row.subject,
                    format_number(row.analytic, 7),
                    format_number(row.simulated, 7),
                    format_interval(row.ci_low, row.ci_high),
                    format_number(row.rel_err, 4),
                    row.verdict + ("" if row.mandatory else " (info)"),
                )
                for row in report.rows
            ),
        ),
    ]
    if report.passed:
        lines.append(LexiconEN.COMPARE_PASSED)
    else:
        lines.append(LexiconEN.COMPARE_FAILED.format(count=len(report.failures)))
    return "\n".join(lines)
