import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Literal

from app.core.errors import ScenarioValidationError
from app.core.model import (
    BernoulliPerFrame,
    Deterministic,
    NS_PER_S,
    Priority,
    Scenario,
)
from app.core.schedule import _build_table


LOGGER = logging.getLogger(__name__)

LOAD_BOUND = 1.0


@dataclass(frozen=True, slots=True)
class Issue:
    severity: Literal["error", "warning"]
    code: str
    message: str
    where: str = ""


@dataclass(slots=True)
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)
    slot_loads: dict[int, float] = field(default_factory=dict)

    @property
    def errors(self) -> list[Issue]:
        return [issue for issue in self.issues if issue.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [issue for issue in self.issues if issue.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, code: str, message: str, where: str = "") -> None:
        self.issues.append(Issue("error", code, message, where))

    def warn(self, code: str, message: str, where: str = "") -> None:
        self.issues.append(Issue("warning", code, message, where))

    def raise_for_errors(self) -> None:
        if not self.ok:
            raise ScenarioValidationError(self)


def _check_geometry(scenario: Scenario, report: ValidationReport) -> None:
    params = scenario.params
    if params.n_m * params.t_m >= params.t_x:
        report.error(
            "geometry",
            f"n_m*T_m = {params.n_m * params.t_m}ns must be below T_x = {params.t_x}ns",
            "protocol",
        )
    if not params.r_h <= params.r_r <= params.r_l:
        report.error("cycles", "cycles must satisfy r_H <= r_R <= r_L", "protocol")
    if params.r_r % params.r_h:
        report.error("cycles", "r_R must be divisible by r_H", "protocol.r_R")
    if params.r_l % params.r_r:
        report.error("cycles", "r_L must be divisible by r_R", "protocol.r_L")


def _check_qos(scenario: Scenario, report: ValidationReport) -> None:
    qos = scenario.qos
    if not qos.hp.delta < qos.rp.delta < qos.lp.delta:
        report.error("qos_order", "delay bounds must satisfy delta_H < delta_R < delta_L", "qos")
    if not qos.hp.rho < qos.rp.rho < qos.lp.rho:
        report.error("qos_order", "collision bounds must satisfy rho_H < rho_R < rho_L", "qos")


def _check_devices(scenario: Scenario, report: ValidationReport) -> None:
    params = scenario.params
    ids = Counter(device.id for device in scenario.devices)
    for device_id, count in ids.items():
        if count > 1:
            report.error("device_id", f"device id {device_id} declared {count} times", "devices")

    assigned = Counter(entry.device for entry in scenario.assignment.entries)
    for entry in scenario.assignment.entries:
        where = f"assignment.device={entry.device}"
        if entry.device not in ids:
            report.error("assignment", f"unknown device {entry.device}", where)
            continue
        device = scenario.device(entry.device)
        cycle = params.cycle(device.priority)
        if not 1 <= entry.slot <= cycle:
            report.error(
                "assignment",
                f"slot {entry.slot} outside the {device.priority.value} cycle of {cycle} slots",
                where,
            )
        if not 1 <= entry.minislot <= params.n_m:
            report.error(
                "assignment",
                f"mini-slot {entry.minislot} outside 1..{params.n_m}",
                where,
            )

    for device in scenario.devices:
        where = f"devices.id={device.id}"
        if assigned[device.id] != 1:
            report.error(
                "assignment",
                f"device {device.id} has {assigned[device.id]} assignment entries, expected exactly 1",
                where,
            )
        delta = scenario.qos.for_priority(device.priority).delta
        mean_gap_ns = NS_PER_S / device.lambda_per_s
        if mean_gap_ns <= delta:
            report.warn(
                "sporadic",
                f"1/lambda = {mean_gap_ns:.0f}ns does not exceed delta = {delta}ns",
                where,
            )
        frame = params.frame_ticks(device.priority)
        expected_p = device.rate_per_tick * frame
        traffic = device.traffic
        if isinstance(traffic, BernoulliPerFrame) and traffic.p is not None:
            if abs(traffic.p - expected_p) > 0.01 * max(expected_p, 1e-12):
                report.warn(
                    "traffic_rate",
                    f"bernoulli p={traffic.p} implies {traffic.p / frame * NS_PER_S:.6g}/s, lambda is {device.lambda_per_s}/s",
                    where,
                )
        if isinstance(traffic, Deterministic):
            implied = NS_PER_S / traffic.period
            if abs(implied - device.lambda_per_s) > 0.01 * device.lambda_per_s:
                report.warn(
                    "traffic_rate",
                    f"deterministic period implies {implied:.6g}/s, lambda is {device.lambda_per_s}/s",
                    where,
                )


def _check_table(scenario: Scenario, report: ValidationReport) -> None:
    params = scenario.params
    table = _build_table(scenario)
    priorities = {device.id: device.priority for device in scenario.devices}
    rates = {device.id: device.rate_per_tick for device in scenario.devices}

    for g, m, devices in table.shared_cells():
        where = f"slot={g} minislot={m}"
        if not params.smsa:
            report.error(
                "exclusivity",
                f"devices {list(devices)} share a mini-slot but SMsA is disabled",
                where,
            )
            continue
        classes = {priorities.get(device, Priority.LP) for device in devices}
        if len(classes) > 1:
            report.error(
                "smsa_class",
                f"devices {list(devices)} of different classes share a mini-slot",
                where,
            )

    bound_frame = params.r_l * params.t_s
    for g in range(1, params.r_l + 1):
        devices = table.devices_in_slot(g)
        if not devices:
            continue
        load = sum(rates.get(device, 0.0) for device in devices) * bound_frame
        report.slot_loads[g] = load
        if load > LOAD_BOUND:
            report.error(
                "load",
                f"slot load {load:.6f} exceeds {LOAD_BOUND} arrivals per LP cycle",
                f"slot={g}",
            )


def _check_analytic(scenario: Scenario, analytic, report: ValidationReport) -> None:
    for device in scenario.devices:
        entry = analytic.devices.get(device.id)
        if entry is None:
            continue
        where = f"devices.id={device.id}"
        qos = scenario.qos.for_priority(device.priority)
        mean_gap_ns = NS_PER_S / device.lambda_per_s
        if entry.ad_ticks > mean_gap_ns:
            report.warn(
                "delay_rate",
                f"analytic AD {entry.ad_ticks}ns exceeds 1/lambda = {mean_gap_ns:.0f}ns",
                where,
            )
        if entry.ad_ticks > qos.delta:
            report.warn(
                "qos_delay",
                f"analytic AD {entry.ad_ticks}ns exceeds delta = {qos.delta}ns",
                where,
            )
        if entry.collision_probability > qos.rho:
            report.warn(
                "qos_collision",
                f"analytic collision probability {entry.collision_probability:.4g} exceeds rho = {qos.rho}",
                where,
            )


def validate_scenario(scenario: Scenario, analytic=None) -> ValidationReport:
    """
    Checks geometry, cycles, assignment structure and per-slot load.

    Soft findings (sporadic-traffic condition, delay and collision bounds
    against an optional analytic report) are warnings; everything else is an
    error.
    """
    report = ValidationReport()
    _check_geometry(scenario, report)
    _check_qos(scenario, report)
    _check_devices(scenario, report)
    _check_table(scenario, report)
    if analytic is not None:
        _check_analytic(scenario, analytic, report)

    for issue in report.issues:
        log = LOGGER.warning if issue.severity == "warning" else LOGGER.info
        log(
            "scenario.validate.issue severity=%s code=%s where=%s message=%s",
            issue.severity,
            issue.code,
            issue.where,
            issue.message,
        )
    LOGGER.info(
        "scenario.validate.complete errors=%s warnings=%s slots=%s",
        len(report.errors),
        len(report.warnings),
        len(report.slot_loads),
    )
    return report
