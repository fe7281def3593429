"""
Domain types shared by the analytic engine and the simulator.

All durations are exact integer nanosecond ticks. Slot, mini-slot and cycle
indices are 1-based, matching scenario files and reports.
"""

import enum
import hashlib
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Literal, Union

NS_PER_US = 1_000
NS_PER_S = 1_000_000_000


class TimeTick(int):
    """Non-negative integer count of nanoseconds."""

    def __new__(cls, value):
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"time tick must be integral, got {value}")
        ticks = int(value)
        if ticks < 0:
            raise ValueError(f"time tick must be non-negative, got {ticks}")
        return super().__new__(cls, ticks)

    @classmethod
    def from_us(cls, microseconds: float | int | str) -> "TimeTick":
        ns = Fraction(str(microseconds)) * NS_PER_US
        if ns.denominator != 1:
            raise ValueError(f"{microseconds}us is not a whole number of nanoseconds")
        return cls(ns.numerator)

    @property
    def us(self) -> float:
        return int(self) / NS_PER_US


class Priority(str, enum.Enum):
    HP = "HP"
    RP = "RP"
    LP = "LP"

    @property
    def rank(self) -> int:
        return {"HP": 0, "RP": 1, "LP": 2}[self.value]


@dataclass(frozen=True, slots=True)
class ProtocolParams:
    n_m: int
    t_m: TimeTick
    t_x: TimeTick
    r_h: int
    r_r: int
    r_l: int
    synccs: bool = False
    buffered: bool = False
    smsa: bool = False

    def __post_init__(self):
        if self.n_m < 1:
            raise ValueError("n_m must be at least 1")
        if min(self.r_h, self.r_r, self.r_l) < 1:
            raise ValueError("assignment cycles must contain at least one slot")
        if self.t_m <= 0 or self.t_x <= 0:
            raise ValueError("mini-slot and transmission durations must be positive")

    @property
    def sensing_ticks(self) -> int:
        return self.n_m * self.t_m

    @property
    def t_s(self) -> TimeTick:
        return TimeTick(self.n_m * self.t_m + self.t_x)

    @property
    def super_cycle(self) -> int:
        return self.r_l

    def cycle(self, priority: Priority) -> int:
        return {Priority.HP: self.r_h, Priority.RP: self.r_r, Priority.LP: self.r_l}[
            priority
        ]

    def frame_ticks(self, priority: Priority) -> TimeTick:
        return TimeTick(self.cycle(priority) * self.t_s)

    def window_offset(self, minislot: int) -> int:
        """Offset from slot start of the sensing window for a mini-slot."""
        return max(minislot - 2, 0) * self.t_m

    def start_offset(self, minislot: int) -> int:
        return (minislot - 1) * self.t_m


@dataclass(frozen=True, slots=True)
class Poisson:
    rate_per_s: float | None = None
    kind: Literal["poisson"] = "poisson"


@dataclass(frozen=True, slots=True)
class BernoulliPerFrame:
    p: float | None = None
    kind: Literal["bernoulli"] = "bernoulli"

    def __post_init__(self):
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"bernoulli probability must lie in [0, 1], got {self.p}")


@dataclass(frozen=True, slots=True)
class Deterministic:
    period: TimeTick
    phase: TimeTick = TimeTick(0)
    kind: Literal["deterministic"] = "deterministic"

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("deterministic period must be positive")


@dataclass(frozen=True, slots=True)
class Trace:
    ticks: tuple[int, ...]
    kind: Literal["trace"] = "trace"

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.ticks, self.ticks[1:])):
            raise ValueError("trace ticks must be strictly increasing")
        if self.ticks and self.ticks[0] < 0:
            raise ValueError("trace ticks must be non-negative")


TrafficProcess = Union[Poisson, BernoulliPerFrame, Deterministic, Trace]


@dataclass(frozen=True, slots=True)
class DeviceSpec:
    id: int
    priority: Priority
    lambda_per_s: float
    traffic: TrafficProcess = field(default_factory=Poisson)

    def __post_init__(self):
        if self.lambda_per_s <= 0:
            raise ValueError(f"device {self.id}: arrival rate must be positive")

    @property
    def rate(self) -> Fraction:
        """Arrival rate in packets per nanosecond, as an exact rational."""
        return Fraction(str(self.lambda_per_s)) / NS_PER_S

    @property
    def rate_per_tick(self) -> float:
        return self.lambda_per_s / NS_PER_S


@dataclass(frozen=True, slots=True)
class AssignmentEntry:
    device: int
    slot: int
    minislot: int


@dataclass(frozen=True, slots=True)
class Assignment:
    entries: tuple[AssignmentEntry, ...]

    def for_device(self, device_id: int) -> AssignmentEntry | None:
        for entry in self.entries:
            if entry.device == device_id:
                return entry
        return None


@dataclass(frozen=True, slots=True)
class ClassQos:
    delta: TimeTick
    rho: float


@dataclass(frozen=True, slots=True)
class QosSpec:
    hp: ClassQos
    rp: ClassQos
    lp: ClassQos

    def for_priority(self, priority: Priority) -> ClassQos:
        return {Priority.HP: self.hp, Priority.RP: self.rp, Priority.LP: self.lp}[
            priority
        ]


@dataclass(frozen=True, slots=True)
class RunControls:
    seed: int = 0
    horizon_slots: int = 100_000
    replications: int = 1

    def __post_init__(self):
        if self.horizon_slots < 1:
            raise ValueError("horizon must cover at least one slot")
        if self.replications < 1:
            raise ValueError("at least one replication is required")


@dataclass(frozen=True, slots=True)
class AnalysisOptions:
    # "sensed": buffered prefactor denominator uses the sensed mini-slot's rate;
    # "own": literal form with the computed device's own rate.
    prefactor: Literal["sensed", "own"] = "sensed"
    # "partner": collision product over partner rates; "own": literal form.
    collision_rate: Literal["partner", "own"] = "partner"


@dataclass(frozen=True, slots=True)
class Scenario:
    params: ProtocolParams
    devices: tuple[DeviceSpec, ...]
    assignment: Assignment
    qos: QosSpec
    run: RunControls = field(default_factory=RunControls)
    analysis: AnalysisOptions = field(default_factory=AnalysisOptions)
    name: str = ""

    def device(self, device_id: int) -> DeviceSpec:
        for device in self.devices:
            if device.id == device_id:
                return device
        raise KeyError(device_id)

    def identity(self) -> str:
        """Stable hash over the canonicalized content (the name is excluded)."""
        payload = asdict(self)
        payload.pop("name", None)
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]
