"""
File-level schema of scenario documents.

Times are microseconds and rates are per second here; conversion to
nanosecond ticks happens in `to_scenario`.
"""

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.model import (
    AnalysisOptions,
    Assignment,
    AssignmentEntry,
    BernoulliPerFrame,
    ClassQos,
    Deterministic,
    DeviceSpec,
    Poisson,
    Priority,
    ProtocolParams,
    QosSpec,
    RunControls,
    Scenario,
    TimeTick,
    Trace,
)


Micros = Union[int, float]


class FileModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)


class ProtocolSection(FileModel):
    n_m: int = Field(ge=1)
    T_m_us: Micros = Field(gt=0)
    T_x_us: Micros = Field(gt=0)
    r_H: int = Field(ge=1)
    r_R: int = Field(ge=1)
    r_L: int = Field(ge=1)
    synccs: bool = False
    buffered: bool = False
    smsa: bool = False


class ClassQosSection(FileModel):
    delta_us: Micros = Field(gt=0)
    rho: float = Field(ge=0.0, le=1.0)


class QosSection(FileModel):
    HP: ClassQosSection
    RP: ClassQosSection
    LP: ClassQosSection


class PoissonTraffic(FileModel):
    kind: Literal["poisson"]
    rate_per_s: float | None = Field(default=None, gt=0)


class BernoulliTraffic(FileModel):
    kind: Literal["bernoulli"]
    p: float | None = Field(default=None, ge=0.0, le=1.0)


class DeterministicTraffic(FileModel):
    kind: Literal["deterministic"]
    period_us: Micros = Field(gt=0)
    phase_us: Micros = Field(default=0, ge=0)


class TraceTraffic(FileModel):
    kind: Literal["trace"]
    ticks_us: list[Micros]

    @field_validator("ticks_us")
    @classmethod
    def check_increasing(cls, v):
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("trace ticks must be strictly increasing")
        return v


TrafficSection = Annotated[
    Union[PoissonTraffic, BernoulliTraffic, DeterministicTraffic, TraceTraffic],
    Field(discriminator="kind"),
]


class DeviceSection(FileModel):
    id: int = Field(ge=1)
    priority: Priority = Field(alias="class")
    lambda_per_s: float = Field(gt=0)
    traffic: TrafficSection = Field(default_factory=lambda: PoissonTraffic(kind="poisson"))


class AssignmentSection(FileModel):
    device: int
    slot: int = Field(ge=1)
    minislot: int = Field(ge=1)


class RunSection(FileModel):
    seed: int = Field(default=0, ge=0)
    horizon_slots: int = Field(default=100_000, ge=1)
    replications: int = Field(default=1, ge=1)


class AnalysisSection(FileModel):
    prefactor: Literal["sensed", "own"] = "sensed"
    collision_rate: Literal["partner", "own"] = "partner"


class ScenarioDocument(FileModel):
    name: str = ""
    protocol: ProtocolSection
    qos: QosSection
    devices: list[DeviceSection] = Field(default_factory=list)
    assignment: list[AssignmentSection] = Field(default_factory=list)
    run: RunSection = Field(default_factory=RunSection)
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)


def _traffic(section) -> object:
    if isinstance(section, PoissonTraffic):
        return Poisson(rate_per_s=section.rate_per_s)
    if isinstance(section, BernoulliTraffic):
        return BernoulliPerFrame(p=section.p)
    if isinstance(section, DeterministicTraffic):
        return Deterministic(
            period=TimeTick.from_us(section.period_us), phase=TimeTick.from_us(section.phase_us)
        )
    return Trace(ticks=tuple(int(TimeTick.from_us(value)) for value in section.ticks_us))


def to_scenario(document: ScenarioDocument) -> Scenario:
    protocol = document.protocol
    qos = document.qos
    return Scenario(
        params=ProtocolParams(
            n_m=protocol.n_m,
            t_m=TimeTick.from_us(protocol.T_m_us),
            t_x=TimeTick.from_us(protocol.T_x_us),
            r_h=protocol.r_H,
            r_r=protocol.r_R,
            r_l=protocol.r_L,
            synccs=protocol.synccs,
            buffered=protocol.buffered,
            smsa=protocol.smsa,
        ),
        devices=tuple(
            DeviceSpec(
                id=device.id,
                priority=device.priority,
                lambda_per_s=device.lambda_per_s,
                traffic=_traffic(device.traffic),
            )
            for device in document.devices
        ),
        assignment=Assignment(
            entries=tuple(
                AssignmentEntry(device=entry.device, slot=entry.slot, minislot=entry.minislot)
                for entry in document.assignment
            )
        ),
        qos=QosSpec(
            hp=ClassQos(delta=TimeTick.from_us(qos.HP.delta_us), rho=qos.HP.rho),
            rp=ClassQos(delta=TimeTick.from_us(qos.RP.delta_us), rho=qos.RP.rho),
            lp=ClassQos(delta=TimeTick.from_us(qos.LP.delta_us), rho=qos.LP.rho),
        ),
        run=RunControls(
            seed=document.run.seed,
            horizon_slots=document.run.horizon_slots,
            replications=document.run.replications,
        ),
        analysis=AnalysisOptions(
            prefactor=document.analysis.prefactor,
            collision_rate=document.analysis.collision_rate,
        ),
        name=document.name,
    )


def _us(ticks: int) -> int | float:
    value = ticks / 1000
    return int(value) if value.is_integer() else value


def _traffic_dict(traffic) -> dict:
    if isinstance(traffic, Poisson):
        data = {"kind": "poisson"}
        if traffic.rate_per_s is not None:
            data["rate_per_s"] = traffic.rate_per_s
        return data
    if isinstance(traffic, BernoulliPerFrame):
        data = {"kind": "bernoulli"}
        if traffic.p is not None:
            data["p"] = traffic.p
        return data
    if isinstance(traffic, Deterministic):
        return {
            "kind": "deterministic",
            "period_us": _us(traffic.period),
            "phase_us": _us(traffic.phase),
        }
    return {"kind": "trace", "ticks_us": [_us(tick) for tick in traffic.ticks]}


def from_scenario(scenario: Scenario) -> dict:
    """Canonical document dict, in the section order files use."""
    params = scenario.params
    return {
        "name": scenario.name,
        "protocol": {
            "n_m": params.n_m,
            "T_m_us": _us(params.t_m),
            "T_x_us": _us(params.t_x),
            "r_H": params.r_h,
            "r_R": params.r_r,
            "r_L": params.r_l,
            "synccs": params.synccs,
            "buffered": params.buffered,
            "smsa": params.smsa,
        },
        "qos": {
            label: {"delta_us": _us(spec.delta), "rho": spec.rho}
            for label, spec in (
                ("HP", scenario.qos.hp),
                ("RP", scenario.qos.rp),
                ("LP", scenario.qos.lp),
            )
        },
        "devices": [
            {
                "id": device.id,
                "class": device.priority.value,
                "lambda_per_s": device.lambda_per_s,
                "traffic": _traffic_dict(device.traffic),
            }
            for device in scenario.devices
        ],
        "assignment": [
            {"device": entry.device, "slot": entry.slot, "minislot": entry.minislot}
            for entry in scenario.assignment.entries
        ],
        "run": {
            "seed": scenario.run.seed,
            "horizon_slots": scenario.run.horizon_slots,
            "replications": scenario.run.replications,
        },
        "analysis": {
            "prefactor": scenario.analysis.prefactor,
            "collision_rate": scenario.analysis.collision_rate,
        },
    }
