"""
Slot-by-slot simulation of mini-slot carrier sensing.

A slot is resolved mini-slot by mini-slot. Arrivals are admitted in global
time order up to each occupant's sensing window (mini-slot m-1, slot start for
m = 1); the first occupied mini-slot with a packet-holding occupant wins the
slot and every later occupant senses it busy. With SyncCS an idle slot ends
after the sensing part.

Runs of slots in which nothing can happen are accounted in bulk unless the
event log is being recorded.
"""

import heapq
import logging
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from time import perf_counter

import numpy as np

from app.config import config
from app.core.errors import EngineInvariantError
from app.core.model import Scenario
from app.core.schedule import expand_schedule
from app.sim.events import EventLog, EventRecord
from app.sim.traffic import device_traffic


LOGGER = logging.getLogger(__name__)


@dataclass(slots=True)
class Packet:
    id: int
    arrival: int
    base: int
    first_start: int | None = None
    replaced_count: int = 0


@dataclass(slots=True)
class DeviceState:
    device_id: int
    minislot: int
    queue: deque = field(default_factory=deque)
    seen: int = 0
    next_packet: int = 0


@dataclass(slots=True)
class SlotResolution:
    ordinal: int
    global_slot: int
    start: int
    duration: int
    winner: int | None = None
    transmitters: tuple[int, ...] = ()
    sensing: dict[int, str] = field(default_factory=dict)

    @property
    def collision(self) -> bool:
        return len(self.transmitters) > 1

    @property
    def idle(self) -> bool:
        return self.winner is None


def arrival_admission(state: DeviceState, arrival: int, buffered: bool) -> Packet | None:
    """
    Queues a new packet and returns the packet it replaced, if any.

    Without buffers a waiting packet is dropped; a packet already in
    transmission has left the queue, so the newcomer simply waits.

    Arrivals later than the device's sensing window are admitted only after
    the slot ends. In a slot where the device committed a packet, such an
    arrival is never counted as a replacement; it waits for the device's
    next opportunity.
    """
    packet = Packet(id=state.next_packet, arrival=arrival, base=state.seen)
    state.next_packet += 1
    replaced = None
    if not buffered and state.queue:
        replaced = state.queue.pop()
        packet.replaced_count = replaced.replaced_count + 1
    state.queue.append(packet)
    return replaced


@dataclass(slots=True)
class RawCounters:
    """Per-run counters, binned by slot ordinal for warm-up and batch means."""

    scenario_id: str
    seed: int
    horizon_slots: int
    device_ids: list[int]
    r_l: int
    bins: int
    arrivals: np.ndarray
    replacements: np.ndarray
    transmissions: np.ndarray
    collided: np.ndarray
    successes: np.ndarray
    adf_sum: np.ndarray
    ad_sum: np.ndarray
    delay_sum: np.ndarray
    idle_slots: np.ndarray
    slot_counts: np.ndarray
    duration: np.ndarray
    slots: np.ndarray
    in_system: np.ndarray
    collision_events: int = 0
    processed_slots: int = 0
    elapsed_ticks: int = 0

    @classmethod
    def empty(cls, scenario_id, seed, horizon_slots, device_ids, r_l, bins) -> "RawCounters":
        devices = len(device_ids)

        def grid(columns, dtype=np.int64):
            return np.zeros((bins, columns), dtype=dtype)

        return cls(
            scenario_id=scenario_id,
            seed=seed,
            horizon_slots=horizon_slots,
            device_ids=list(device_ids),
            r_l=r_l,
            bins=bins,
            arrivals=grid(devices),
            replacements=grid(devices),
            transmissions=grid(devices),
            collided=grid(devices),
            successes=grid(devices),
            adf_sum=grid(devices, np.float64),
            ad_sum=grid(devices, np.float64),
            delay_sum=grid(devices, np.float64),
            idle_slots=grid(r_l),
            slot_counts=grid(r_l),
            duration=np.zeros(bins, dtype=np.int64),
            slots=np.zeros(bins, dtype=np.int64),
            in_system=np.zeros(devices, dtype=np.int64),
        )

    def bin_of(self, ordinal: int) -> int:
        return ordinal * self.bins // self.horizon_slots

    def column(self, device_id: int) -> int:
        return self.device_ids.index(device_id)

    def check_conservation(self) -> None:
        lost = self.successes.sum(0) + self.collided.sum(0) + self.replacements.sum(0)
        balance = self.arrivals.sum(0) - lost - self.in_system
        for device_id, delta in zip(self.device_ids, balance):
            if delta:
                raise EngineInvariantError(
                    f"device {device_id}: packet balance off by {int(delta)}"
                )


class SlotEngine:
    def __init__(self, scenario: Scenario, seed: int | None = None, *, record: bool = False):
        self.scenario = scenario
        self.params = scenario.params
        self.table = expand_schedule(scenario)
        self.seed = scenario.run.seed if seed is None else seed
        self.horizon = scenario.run.horizon_slots
        self.log = EventLog(enabled=record)
        self.record = record
        self.idle_ticks = (
            self.params.sensing_ticks if self.params.synccs else int(self.params.t_s)
        )

        device_ids = sorted(device.id for device in scenario.devices)
        self.states: list[DeviceState] = []
        self.offsets: list[list[int]] = []
        self.arrivals: list[np.ndarray] = []
        horizon_ticks = self.horizon * int(self.params.t_s)
        for device_id in device_ids:
            device = scenario.device(device_id)
            entry = scenario.assignment.for_device(device_id)
            self.states.append(DeviceState(device_id=device_id, minislot=entry.minislot))
            self.offsets.append([g - 1 for g in self.table.occurrences(device_id)])
            self.arrivals.append(
                device_traffic(device, self.params, entry.slot, self.seed, horizon_ticks)
            )
        column = {device_id: index for index, device_id in enumerate(device_ids)}
        self.occupants = [
            [
                (m, [column[device_id] for device_id in devices])
                for m, devices in self.table.occupants(g)
            ]
            for g in range(1, self.table.r_l + 1)
        ]

        self.pointer = [0] * len(device_ids)
        self.heap = [
            (int(ticks[0]), index) for index, ticks in enumerate(self.arrivals) if len(ticks)
        ]
        heapq.heapify(self.heap)
        self.holders: set[int] = set()
        self.counters = RawCounters.empty(
            scenario.identity(),
            self.seed,
            self.horizon,
            device_ids,
            self.table.r_l,
            min(config.stat_bins, self.horizon),
        )
        self.ordinal = 0
        self.clock = 0

    def _admit_until(self, cutoff: int, ordinal: int, batch: list) -> None:
        counters = self.counters
        buffered = self.params.buffered
        row = counters.bin_of(ordinal)
        while self.heap and self.heap[0][0] < cutoff:
            tick, index = heapq.heappop(self.heap)
            state = self.states[index]
            replaced = arrival_admission(state, tick, buffered)
            counters.arrivals[row, index] += 1
            self.holders.add(index)
            if self.record:
                batch.append(
                    EventRecord(tick, "arrival", ordinal, state.device_id, state.queue[-1].id)
                )
                if replaced is not None:
                    batch.append(
                        EventRecord(tick, "replacement", ordinal, state.device_id, replaced.id)
                    )
            if replaced is not None:
                counters.replacements[row, index] += 1

            self.pointer[index] += 1
            ticks = self.arrivals[index]
            if self.pointer[index] < len(ticks):
                heapq.heappush(self.heap, (int(ticks[self.pointer[index]]), index))

    def _next_active(self, ordinal: int, clock: int) -> int:
        """First slot ordinal at or after `ordinal` that is not certainly idle."""
        r_l = self.table.r_l
        target = self.horizon
        base = ordinal - ordinal % r_l
        for index in self.holders:
            offsets = self.offsets[index]
            position = bisect_left(offsets, ordinal % r_l)
            if position < len(offsets):
                candidate = base + offsets[position]
            else:
                candidate = base + r_l + offsets[0]
            target = min(target, candidate)
        if self.heap:
            tick = self.heap[0][0]
            target = min(target, ordinal + max(0, tick - clock) // self.idle_ticks)
        return target

    def _skip_idle(self, ordinal: int, count: int) -> None:
        counters = self.counters
        r_l = self.table.r_l
        while count > 0:
            row = counters.bin_of(ordinal)
            bin_end = -(-(row + 1) * self.horizon // counters.bins)
            take = min(count, bin_end - ordinal)
            full, rest = divmod(take, r_l)
            counters.idle_slots[row] += full
            counters.slot_counts[row] += full
            if rest:
                positions = (ordinal + np.arange(rest)) % r_l
                np.add.at(counters.idle_slots[row], positions, 1)
                np.add.at(counters.slot_counts[row], positions, 1)
            counters.duration[row] += take * self.idle_ticks
            counters.slots[row] += take
            ordinal += take
            count -= take

    def step(self) -> SlotResolution:
        """Resolves the next slot and advances the clock past it."""
        params = self.params
        counters = self.counters
        ordinal = self.ordinal
        start = self.clock
        g = ordinal % self.table.r_l
        row = counters.bin_of(ordinal)
        batch: list[EventRecord] = []
        if self.record:
            batch.append(EventRecord(start, "slot_start", ordinal, detail=g + 1))

        resolution = SlotResolution(
            ordinal=ordinal, global_slot=g + 1, start=start, duration=self.idle_ticks
        )
        committed: list[tuple[int, Packet]] = []
        for m, indices in self.occupants[g]:
            self._admit_until(start + params.window_offset(m), ordinal, batch)
            opportunity = start + params.start_offset(m)
            for index in indices:
                state = self.states[index]
                state.seen += 1
                for packet in reversed(state.queue):
                    if packet.first_start is not None:
                        break
                    packet.first_start = opportunity

            if resolution.winner is not None:
                for index in indices:
                    resolution.sensing[self.states[index].device_id] = "busy"
                continue
            ready = [index for index in indices if self.states[index].queue]
            for index in indices:
                if index not in ready:
                    resolution.sensing[self.states[index].device_id] = "empty"
            if not ready:
                continue
            resolution.winner = m
            for index in ready:
                state = self.states[index]
                committed.append((index, state.queue.popleft()))
                resolution.sensing[state.device_id] = "transmit"
                if not state.queue:
                    self.holders.discard(index)
            resolution.transmitters = tuple(self.states[index].device_id for index, _ in committed)

        if committed:
            resolution.duration = int(params.t_s)
            tx_start = start + params.start_offset(resolution.winner)
            tx_end = tx_start + params.t_x
            collided = len(committed) > 1
            if collided:
                if not params.smsa:
                    raise EngineInvariantError(
                        f"collision in slot ordinal {ordinal} without shared mini-slots"
                    )
                counters.collision_events += 1
            for index, packet in committed:
                state = self.states[index]
                counters.transmissions[row, index] += 1
                if self.record:
                    batch.append(
                        EventRecord(
                            tx_start, "tx_start", ordinal, state.device_id, packet.id,
                            resolution.winner,
                        )
                    )
                    batch.append(
                        EventRecord(
                            tx_end, "collision" if collided else "success", ordinal,
                            state.device_id, packet.id,
                        )
                    )
                if collided:
                    counters.collided[row, index] += 1
                    continue
                counters.successes[row, index] += 1
                counters.adf_sum[row, index] += state.seen - packet.base
                counters.ad_sum[row, index] += tx_end - packet.first_start
                counters.delay_sum[row, index] += tx_end - packet.arrival
        else:
            counters.idle_slots[row, g] += 1

        end = start + resolution.duration
        self._admit_until(end, ordinal, batch)
        counters.slot_counts[row, g] += 1
        counters.duration[row] += resolution.duration
        counters.slots[row] += 1
        counters.processed_slots += 1
        if self.record:
            batch.append(EventRecord(end, "slot_end", ordinal, detail=resolution.duration))
            self.log.extend_slot(batch)

        self.ordinal += 1
        self.clock = end
        return resolution

    def run(self) -> tuple[EventLog, RawCounters]:
        started = perf_counter()
        while self.ordinal < self.horizon:
            if not self.record:
                target = min(self._next_active(self.ordinal, self.clock), self.horizon)
                if target > self.ordinal:
                    skipped = target - self.ordinal
                    self._skip_idle(self.ordinal, skipped)
                    self.clock += skipped * self.idle_ticks
                    self.ordinal = target
                    continue
            self.step()

        counters = self.counters
        counters.in_system[:] = [len(state.queue) for state in self.states]
        counters.elapsed_ticks = self.clock
        counters.check_conservation()
        LOGGER.info(
            "sim.run.complete scenario=%s seed=%s slots=%s processed=%s arrivals=%s collisions=%s duration_ms=%.3f",
            counters.scenario_id,
            self.seed,
            self.horizon,
            counters.processed_slots,
            int(counters.arrivals.sum()),
            counters.collision_events,
            (perf_counter() - started) * 1000,
        )
        return self.log, counters


def run(
    scenario: Scenario, seed: int | None = None, *, record: bool = False
) -> tuple[EventLog, RawCounters]:
    """Simulates run.horizon_slots slots; the log is empty unless `record` is set."""
    return SlotEngine(scenario, seed, record=record).run()
