import logging
from dataclasses import dataclass, field
from time import perf_counter

from app.analytic.adf import (
    AdfVector,
    adf_buffered,
    adf_no_buffer,
    adf_to_delay,
    slot_idle_probability,
)
from app.analytic.loads import MiniSlotLoad, build_loads
from app.analytic.smsa import SmsaSolution, smsa_solve_buffered, smsa_solve_no_buffer
from app.analytic.synccs import (
    FrameLength,
    synccs_frame_length_buffered,
    synccs_frame_length_no_buffer,
)
from app.core.errors import OverloadError
from app.core.model import Priority, Scenario, TimeTick
from app.core.schedule import GlobalSlotTable, expand_schedule


LOGGER = logging.getLogger(__name__)


@dataclass(slots=True)
class DeviceAnalysis:
    device_id: int
    priority: Priority
    slots: list[int]
    minislot: int
    adf: float
    ad_ticks: TimeTick
    base_delay_ticks: TimeTick
    delay_ticks: TimeTick
    collision_probability: float
    frame_ticks: float
    share_ratio: float = 0.0


@dataclass(slots=True)
class SlotAnalysis:
    slot: int
    idle_probability: float
    solver: str

    @property
    def throughput(self) -> float:
        return 1.0 - self.idle_probability


@dataclass(slots=True)
class AnalyticReport:
    scenario_id: str
    slot_ticks: float
    frame_ticks: float
    efficiency: float
    devices: dict[int, DeviceAnalysis] = field(default_factory=dict)
    slots: dict[int, SlotAnalysis] = field(default_factory=dict)
    frame: FrameLength | None = None
    # forms of the SMsA prefactor and collision product the solvers used
    prefactor: str = "sensed"
    collision_rate: str = "partner"
    warnings: list[str] = field(default_factory=list)

    @property
    def expected_frame(self) -> float | None:
        """Expected super-cycle length under SyncCS; None with fixed slots."""
        return None if self.frame is None else self.frame.expected_ticks


def _solve_slot(load: MiniSlotLoad, scenario: Scenario):
    options = scenario.analysis
    if load.empty:
        return AdfVector(slot=load.slot)
    load.check()
    if scenario.params.buffered:
        if load.exclusive:
            return adf_buffered(load, prefactor=options.prefactor)
        return smsa_solve_buffered(
            load, prefactor=options.prefactor, collision_rate=options.collision_rate
        )
    if load.exclusive:
        return adf_no_buffer(load)
    return smsa_solve_no_buffer(load, collision_rate=options.collision_rate)


def _solve_all(scenario: Scenario, table: GlobalSlotTable):
    params = scenario.params
    frame = None
    if params.synccs:
        loads = build_loads(scenario, table, float(params.t_s))
        for load in loads:
            if not load.empty:
                load.check()
        if params.buffered:
            frame = synccs_frame_length_buffered(loads, params)
        else:
            frame, solutions = synccs_frame_length_no_buffer(
                loads, params, collision_rate=scenario.analysis.collision_rate
            )
            return frame, [load.with_slot_ticks(frame.slot_ticks) for load in loads], solutions
        slot_ticks = frame.slot_ticks
    else:
        slot_ticks = float(params.t_s)

    loads = build_loads(scenario, table, slot_ticks)
    solutions = []
    failures = []
    for load in loads:
        try:
            solutions.append(_solve_slot(load, scenario))
        except OverloadError as exc:
            failures.append(exc)
            solutions.append(None)
    if failures:
        raise OverloadError(
            "; ".join(str(exc) for exc in failures),
            slot=failures[0].slot,
            minislot=failures[0].minislot,
        )
    return frame, loads, solutions


def _device_terms(solution, device_id: int, minislot: int) -> tuple[float, float, float]:
    if isinstance(solution, SmsaSolution):
        device = solution.devices[device_id]
        return device.tau, device.q, device.share_ratio
    return solution.tau_at(minislot), 0.0, 0.0


def analytic_report(scenario: Scenario) -> AnalyticReport:
    """
    Analytic AD-F, delays, idle and collision probabilities for a scenario.

    Dispatches per slot to the exclusive or SMsA solvers for the buffer mode,
    with per-frame rates normalized by the expected slot length when SyncCS
    is on. Overload in several slots is reported in one error.
    """
    started = perf_counter()
    params = scenario.params
    table = expand_schedule(scenario)
    frame, loads, solutions = _solve_all(scenario, table)
    slot_ticks = frame.slot_ticks if frame is not None else float(params.t_s)

    report = AnalyticReport(
        scenario_id=scenario.identity(),
        slot_ticks=slot_ticks,
        frame_ticks=params.r_l * slot_ticks,
        efficiency=params.t_x / params.t_s,
        frame=frame,
        prefactor=scenario.analysis.prefactor,
        collision_rate=scenario.analysis.collision_rate,
    )

    for load, solution in zip(loads, solutions):
        report.slots[load.slot] = SlotAnalysis(
            slot=load.slot,
            idle_probability=slot_idle_probability(load, params.buffered, solution),
            solver="empty" if load.empty else "exclusive" if load.exclusive else "smsa",
        )
        if isinstance(solution, SmsaSolution):
            report.warnings.extend(solution.warnings)

    for device in scenario.devices:
        entry = scenario.assignment.for_device(device.id)
        occurrences = table.occurrences(device.id)
        if entry is None or not occurrences:
            continue
        terms = [
            _device_terms(solutions[g - 1], device.id, entry.minislot) for g in occurrences
        ]
        adf = sum(term[0] for term in terms) / len(terms)
        collision = sum(term[1] for term in terms) / len(terms)
        share = max(term[2] for term in terms)
        logical_frame = params.cycle(device.priority) * slot_ticks
        ad_ticks = adf_to_delay(adf, logical_frame, params.t_x)
        base_delay = TimeTick(round(logical_frame / 2.0))
        report.devices[device.id] = DeviceAnalysis(
            device_id=device.id,
            priority=device.priority,
            slots=occurrences,
            minislot=entry.minislot,
            adf=adf,
            ad_ticks=ad_ticks,
            base_delay_ticks=base_delay,
            delay_ticks=TimeTick(base_delay + ad_ticks),
            collision_probability=collision,
            frame_ticks=logical_frame,
            share_ratio=share,
        )

    LOGGER.info(
        "analytic.report.complete scenario=%s devices=%s slots=%s synccs=%s buffered=%s duration_ms=%.3f",
        report.scenario_id,
        len(report.devices),
        len(report.slots),
        params.synccs,
        params.buffered,
        (perf_counter() - started) * 1000,
    )
    return report
