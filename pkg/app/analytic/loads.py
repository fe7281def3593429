from dataclasses import dataclass, replace
from typing import Sequence

from app.core.errors import OverloadError
from app.core.model import Scenario
from app.core.schedule import GlobalSlotTable


@dataclass(frozen=True, slots=True)
class LoadEntry:
    device_id: int
    rate: float  # packets per tick
    cycle: int = 1  # slots per logical frame of the device's class


@dataclass(frozen=True, slots=True)
class MiniSlotLoad:
    """
    Per mini-slot occupants of one slot, with their arrival rates.

    The dimensionless per-frame expectation of an entry is
    rate * cycle * slot_ticks, so the same load can be re-normalized when the
    expected slot length changes (SyncCS).
    """

    slot: int
    minislots: tuple[tuple[LoadEntry, ...], ...]
    slot_ticks: float = 1.0

    @classmethod
    def from_norms(cls, norms: Sequence, slot: int = 1) -> "MiniSlotLoad":
        """
        Builds a load from per-frame expectations directly.

        `norms` lists one value per mini-slot (exclusive) or one list per
        mini-slot (shared); device ids are assigned 1, 2, ... in order.
        """
        next_id = 1
        minislots = []
        for item in norms:
            values = item if isinstance(item, (list, tuple)) else [item]
            entries = []
            for value in values:
                if value is None:
                    continue
                entries.append(LoadEntry(device_id=next_id, rate=float(value)))
                next_id += 1
            minislots.append(tuple(entries))
        return cls(slot=slot, minislots=tuple(minislots), slot_ticks=1.0)

    def norm(self, entry: LoadEntry) -> float:
        return entry.rate * entry.cycle * self.slot_ticks

    def with_slot_ticks(self, slot_ticks: float) -> "MiniSlotLoad":
        return replace(self, slot_ticks=slot_ticks)

    def occupied(self) -> list[tuple[int, tuple[LoadEntry, ...]]]:
        return [(m + 1, entries) for m, entries in enumerate(self.minislots) if entries]

    @property
    def exclusive(self) -> bool:
        return all(len(entries) <= 1 for entries in self.minislots)

    @property
    def empty(self) -> bool:
        return not any(self.minislots)

    @property
    def total(self) -> float:
        return sum(self.norm(entry) for entries in self.minislots for entry in entries)

    def check(self) -> None:
        for m, entries in self.occupied():
            for entry in entries:
                value = self.norm(entry)
                if not 0.0 <= value < 1.0:
                    raise OverloadError(
                        f"device {entry.device_id} expects {value:.6g} arrivals per frame",
                        slot=self.slot,
                        minislot=m,
                    )
        if self.total >= 1.0:
            raise OverloadError(
                f"slot load {self.total:.6g} is not below one arrival per frame",
                slot=self.slot,
            )


def build_loads(
    scenario: Scenario, table: GlobalSlotTable, slot_ticks: float
) -> list[MiniSlotLoad]:
    """One load per global slot of the super-cycle, unoccupied slots included."""
    params = scenario.params
    by_id = {device.id: device for device in scenario.devices}
    loads = []
    for g in range(1, table.r_l + 1):
        minislots = []
        for m in range(1, table.n_m + 1):
            minislots.append(
                tuple(
                    LoadEntry(
                        device_id=device_id,
                        rate=by_id[device_id].rate_per_tick,
                        cycle=params.cycle(by_id[device_id].priority),
                    )
                    for device_id in table.cell(g, m)
                )
            )
        loads.append(MiniSlotLoad(slot=g, minislots=tuple(minislots), slot_ticks=slot_ticks))
    return loads
