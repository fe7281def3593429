from collections import defaultdict

import numpy as np

from app.core.model import ProtocolParams
from app.core.schedule import GlobalSlotTable
from app.sim.events import EventLog


def _windows(log: EventLog, schedule: GlobalSlotTable, params: ProtocolParams):
    """Sensing-window start of every occurrence, per device, keyed by slot ordinal."""
    windows: dict[int, dict[int, int]] = defaultdict(dict)
    for record in log.of_kind("slot_start"):
        for m, devices in schedule.occupants(record.detail):
            window = record.tick + params.window_offset(m)
            for device_id in devices:
                windows[device_id][record.slot] = window
    return windows


def measure_adf(
    log: EventLog, schedule: GlobalSlotTable, params: ProtocolParams
) -> dict[int, np.ndarray]:
    """
    AD-F of every successfully transmitted packet, recomputed from the log.

    An occurrence counts when the packet arrived strictly before the device's
    sensing window in it; the transmitting occurrence is the last one counted.
    """
    windows = _windows(log, schedule, params)
    ordered = {
        device_id: np.array(sorted(by_slot.values()), dtype=np.int64)
        for device_id, by_slot in windows.items()
    }
    arrivals = {
        (record.device, record.packet): record.tick for record in log.of_kind("arrival")
    }

    samples: dict[int, list[int]] = defaultdict(list)
    for record in log.of_kind("success"):
        arrival = arrivals[(record.device, record.packet)]
        used = windows[record.device][record.slot]
        starts = ordered[record.device]
        counted = np.searchsorted(starts, used, side="right") - np.searchsorted(
            starts, arrival, side="right"
        )
        samples[record.device].append(int(counted))
    return {device_id: np.asarray(values) for device_id, values in samples.items()}
