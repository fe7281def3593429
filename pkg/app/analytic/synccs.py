"""
Expected frame length when idle slots are truncated by SyncCS.

A frame is the list of loads passed in (one per slot). Its expected length is
n_s idle-length slots plus T_x for every expected busy slot.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from app.analytic.adf import AdfVector, adf_no_buffer
from app.analytic.loads import MiniSlotLoad
from app.analytic.smsa import SmsaSolution, smsa_solve_no_buffer
from app.config import config
from app.core.errors import NonConvergenceError, OverloadError
from app.core.model import ProtocolParams, TimeTick


LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class FrameLength:
    expected_ticks: float
    busy_slots: float
    slot_ticks: float
    iterations: int = 0
    residual: float = 0.0

    @property
    def frame_ticks(self) -> TimeTick:
        return TimeTick(round(self.expected_ticks))


def _rate_sum(all_loads: Sequence[MiniSlotLoad]) -> float:
    """Per-tick arrival rate landing in one frame of len(all_loads) slots."""
    n_s = len(all_loads)
    return (
        sum(
            entry.rate * entry.cycle
            for load in all_loads
            for entries in load.minislots
            for entry in entries
        )
        / n_s
    )


def synccs_frame_length_buffered(
    all_loads: Sequence[MiniSlotLoad], params: ProtocolParams
) -> FrameLength:
    n_s = len(all_loads)
    rate = _rate_sum(all_loads)
    denominator = 1.0 - rate * params.t_x
    if denominator <= 0.0:
        raise OverloadError(
            f"aggregate rate times T_x is {rate * params.t_x:.6g}; the expected frame is unbounded"
        )
    expected = n_s * params.sensing_ticks / denominator
    return FrameLength(
        expected_ticks=expected,
        busy_slots=expected * rate,
        slot_ticks=expected / n_s,
    )


def solve_slot_no_buffer(load: MiniSlotLoad, tol, max_iter, damping, collision_rate):
    if load.exclusive:
        return adf_no_buffer(load)
    return smsa_solve_no_buffer(
        load, tol, max_iter, damping=damping, collision_rate=collision_rate
    )


def synccs_frame_length_no_buffer(
    all_loads: Sequence[MiniSlotLoad],
    params: ProtocolParams,
    tol: float | None = None,
    max_iter: int | None = None,
    *,
    damping: float | None = None,
    collision_rate: str = "partner",
) -> tuple[FrameLength, list[AdfVector | SmsaSolution]]:
    """
    Couples the expected frame length with the effective rates.

    Effective rates depend on the frame length through the per-frame
    normalization, so the slot length is iterated with damping, starting
    from the buffered closed form.
    """
    tol = config.solver_tol if tol is None else tol
    max_iter = config.solver_max_iter if max_iter is None else max_iter
    damping = config.solver_damping if damping is None else damping
    n_s = len(all_loads)

    slot_ticks = synccs_frame_length_buffered(all_loads, params).slot_ticks
    residual = math.inf
    for iteration in range(1, max_iter + 1):
        solutions = [
            solve_slot_no_buffer(
                load.with_slot_ticks(slot_ticks), tol, max_iter, damping, collision_rate
            )
            for load in all_loads
        ]
        busy = sum(sum(solution.transmit_rates()) for solution in solutions)
        target = (n_s * params.sensing_ticks + busy * params.t_x) / n_s
        residual = abs(target - slot_ticks) / slot_ticks
        if residual < tol:
            LOGGER.debug(
                "analytic.synccs.no_buffer.converged iterations=%s slot_ticks=%.3f busy=%.6f",
                iteration,
                target,
                busy,
            )
            return (
                FrameLength(
                    expected_ticks=n_s * slot_ticks,
                    busy_slots=busy,
                    slot_ticks=slot_ticks,
                    iterations=iteration,
                    residual=residual,
                ),
                solutions,
            )
        slot_ticks = (1.0 - damping) * slot_ticks + damping * target

    raise NonConvergenceError("SyncCS frame length", max_iter, residual)
