from dataclasses import dataclass

from app.core.model import Priority, Scenario


@dataclass(frozen=True, slots=True)
class GlobalSlotTable:
    """
    Occupants of every (global slot, mini-slot) cell over one r_L super-cycle.

    `cells[g - 1][m - 1]` holds the device ids assigned mini-slot m of global
    slot g, in ascending id order. Global slots beyond r_L wrap around.
    """

    r_l: int
    n_m: int
    cells: tuple[tuple[tuple[int, ...], ...], ...]

    def _index(self, slot: int) -> int:
        return (slot - 1) % self.r_l

    def cell(self, slot: int, minislot: int) -> tuple[int, ...]:
        return self.cells[self._index(slot)][minislot - 1]

    def occupants(self, slot: int) -> list[tuple[int, tuple[int, ...]]]:
        """Occupied mini-slots of a global slot, ordered by mini-slot index."""
        row = self.cells[self._index(slot)]
        return [(m + 1, devices) for m, devices in enumerate(row) if devices]

    def slot_for_ordinal(self, ordinal: int) -> int:
        return ordinal % self.r_l + 1

    def occurrences(self, device_id: int) -> list[int]:
        return [
            g + 1
            for g, row in enumerate(self.cells)
            if any(device_id in devices for devices in row)
        ]

    def devices_in_slot(self, slot: int) -> list[int]:
        row = self.cells[self._index(slot)]
        return [device for devices in row for device in devices]

    def shared_cells(self) -> list[tuple[int, int, tuple[int, ...]]]:
        return [
            (g + 1, m + 1, devices)
            for g, row in enumerate(self.cells)
            for m, devices in enumerate(row)
            if len(devices) > 1
        ]

    @property
    def entry_count(self) -> int:
        return sum(len(devices) for row in self.cells for devices in row)


def _build_table(scenario: Scenario) -> GlobalSlotTable:
    params = scenario.params
    grid: list[list[list[int]]] = [
        [[] for _ in range(params.n_m)] for _ in range(params.r_l)
    ]
    priorities = {device.id: device.priority for device in scenario.devices}

    for entry in sorted(scenario.assignment.entries, key=lambda e: e.device):
        priority = priorities.get(entry.device, Priority.LP)
        cycle = params.cycle(priority)
        if not 1 <= entry.minislot <= params.n_m:
            continue
        for g in range(1, params.r_l + 1):
            if (g - entry.slot) % cycle == 0:
                grid[g - 1][entry.minislot - 1].append(entry.device)

    return GlobalSlotTable(
        r_l=params.r_l,
        n_m=params.n_m,
        cells=tuple(tuple(tuple(cell) for cell in row) for row in grid),
    )


def expand_schedule(scenario: Scenario) -> GlobalSlotTable:
    """
    Expands class-cycle assignments into the r_L-slot global table.

    A device of class c at class slot l occupies every global slot g with
    g = l (mod r_c).
    """
    return _build_table(scenario)
