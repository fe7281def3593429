"""
Fixed-point solvers for slots where several devices share a mini-slot.

Collided transmissions occupy the channel once, so the aggregated rate of a
mini-slot folds each device's rate by (1 - q/n), with q the conditional
collision probability and n the expected number of colliding packets.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Literal

from app.analytic.adf import buffered_base, buffered_prefactor, effective_rate, next_tau
from app.analytic.loads import LoadEntry, MiniSlotLoad
from app.config import config
from app.core.errors import NonConvergenceError, OverloadError


LOGGER = logging.getLogger(__name__)

SHARE_RATIO_LIMIT = 0.1


@dataclass(slots=True)
class DeviceCollision:
    device_id: int
    minislot: int
    tau: float
    lambda_eff: float
    q: float = 0.0
    n: float = 1.0
    share_ratio: float = 0.0


@dataclass(slots=True)
class SmsaSolution:
    slot: int
    minislots: list[int] = field(default_factory=list)
    aggregate: list[float] = field(default_factory=list)
    gamma: list[float] = field(default_factory=list)
    tau: list[float] = field(default_factory=list)
    devices: dict[int, DeviceCollision] = field(default_factory=dict)
    converged: bool = False
    residual: float = math.inf
    iterations: int = 0
    warnings: list[str] = field(default_factory=list)

    def tau_at(self, minislot: int) -> float:
        return self.tau[self.minislots.index(minislot)]

    def transmit_rates(self) -> list[float]:
        return list(self.aggregate)


def _collision_terms(
    loads: MiniSlotLoad,
    entries: tuple[LoadEntry, ...],
    tau: float,
    collision_rate: Literal["partner", "own"],
    minislot: int,
) -> dict[int, tuple[float, float]]:
    terms = {}
    for entry in entries:
        survive = 1.0
        expected = 1.0
        for partner in entries:
            if partner is entry:
                continue
            rate_source = partner if collision_rate == "partner" else entry
            chance = tau * loads.norm(rate_source)
            if chance >= 1.0:
                raise OverloadError(
                    f"device {entry.device_id} expects {chance:.6g} partner arrivals per opportunity",
                    slot=loads.slot,
                    minislot=minislot,
                )
            survive *= 1.0 - chance
            expected += tau * loads.norm(partner)
        terms[entry.device_id] = (1.0 - survive, expected)
    return terms


def _relax(old: dict, new: dict, damping: float) -> tuple[dict, float]:
    residual = 0.0
    relaxed = {}
    for key, value in new.items():
        previous = old.get(key, value)
        residual = max(residual, abs(value - previous))
        relaxed[key] = (1.0 - damping) * previous + damping * value
    return relaxed, residual


def _resolve(tol, max_iter, damping):
    return (
        config.solver_tol if tol is None else tol,
        config.solver_max_iter if max_iter is None else max_iter,
        config.solver_damping if damping is None else damping,
    )


def smsa_solve_no_buffer(
    loads: MiniSlotLoad,
    tol: float | None = None,
    max_iter: int | None = None,
    *,
    damping: float | None = None,
    collision_rate: Literal["partner", "own"] = "partner",
) -> SmsaSolution:
    """
    Shared AD-F per mini-slot with packet replacement.

    Devices of one mini-slot share tau; q and n start at 0 and 1.
    """
    tol, max_iter, damping = _resolve(tol, max_iter, damping)
    groups = loads.occupied()
    all_entries = [entry for _, entries in groups for entry in entries]
    q = {entry.device_id: 0.0 for entry in all_entries}
    n = {entry.device_id: 1.0 for entry in all_entries}
    residual = math.inf

    for iteration in range(1, max_iter + 1):
        solution = SmsaSolution(slot=loads.slot)
        new_q: dict[int, float] = {}
        new_n: dict[int, float] = {}
        tau = 1.0
        gamma = 0.0
        for index, (minislot, entries) in enumerate(groups):
            aggregate = 0.0
            for entry in entries:
                rate = effective_rate(loads.norm(entry), tau)
                aggregate += rate * (1.0 - q[entry.device_id] / n[entry.device_id])
                solution.devices[entry.device_id] = DeviceCollision(
                    device_id=entry.device_id, minislot=minislot, tau=tau, lambda_eff=rate
                )
            gamma += aggregate
            solution.minislots.append(minislot)
            solution.tau.append(tau)
            solution.aggregate.append(aggregate)
            solution.gamma.append(gamma)

            for device_id, (q_i, n_i) in _collision_terms(
                loads, entries, tau, collision_rate, minislot
            ).items():
                new_q[device_id] = q_i
                new_n[device_id] = n_i
                solution.devices[device_id].q = q_i
                solution.devices[device_id].n = n_i

            if index + 1 < len(groups):
                tau = next_tau(tau, aggregate, gamma, slot=loads.slot, minislot=minislot)

        q, residual_q = _relax(q, new_q, damping)
        n, residual_n = _relax(n, new_n, damping)
        residual = max(residual_q, residual_n)
        solution.iterations = iteration
        solution.residual = residual
        if residual < tol:
            solution.converged = True
            LOGGER.debug(
                "analytic.smsa.no_buffer.converged slot=%s iterations=%s residual=%.3e",
                loads.slot,
                iteration,
                residual,
            )
            return solution

    raise NonConvergenceError(f"SMsA solver for slot {loads.slot}", max_iter, residual)


def smsa_solve_buffered(
    loads: MiniSlotLoad,
    tol: float | None = None,
    max_iter: int | None = None,
    *,
    damping: float | None = None,
    prefactor: Literal["sensed", "own"] = "sensed",
    collision_rate: Literal["partner", "own"] = "partner",
) -> SmsaSolution:
    """
    Per-device AD-F with buffers; the recursion runs on the mini-slot mean.

    The accuracy condition (each device small against the cumulative rate up
    to its mini-slot) is evaluated and reported, never enforced.
    """
    tol, max_iter, damping = _resolve(tol, max_iter, damping)
    groups = loads.occupied()
    all_entries = [entry for _, entries in groups for entry in entries]
    q = {entry.device_id: 0.0 for entry in all_entries}
    n = {entry.device_id: 1.0 for entry in all_entries}
    residual = math.inf

    for iteration in range(1, max_iter + 1):
        solution = SmsaSolution(slot=loads.slot)
        new_q: dict[int, float] = {}
        new_n: dict[int, float] = {}
        gamma = 0.0
        raw_cumulative = 0.0
        previous: tuple[int, float, float, float] | None = None
        for minislot, entries in groups:
            norms = {entry.device_id: loads.norm(entry) for entry in entries}
            if previous is None:
                taus = {device_id: buffered_base(norm) for device_id, norm in norms.items()}
            else:
                prev_minislot, mean_tau, prev_aggregate, prev_gamma = previous
                hat = next_tau(
                    mean_tau, prev_aggregate, prev_gamma, slot=loads.slot, minislot=prev_minislot
                )
                taus = {
                    device_id: buffered_prefactor(
                        prev_gamma,
                        sensed_rate=prev_aggregate,
                        own_rate=norm,
                        prefactor=prefactor,
                        slot=loads.slot,
                        minislot=minislot,
                    )
                    * (hat - 1.0)
                    + 1.0
                    for device_id, norm in norms.items()
                }
            mean_tau = sum(taus.values()) / len(taus)

            aggregate = sum(
                norms[device_id] * (1.0 - q[device_id] / n[device_id]) for device_id in norms
            )
            gamma += aggregate
            raw_cumulative += sum(norms.values())
            solution.minislots.append(minislot)
            solution.tau.append(mean_tau)
            solution.aggregate.append(aggregate)
            solution.gamma.append(gamma)

            terms = _collision_terms(loads, entries, mean_tau, collision_rate, minislot)
            for device_id, norm in norms.items():
                q_i, n_i = terms[device_id]
                new_q[device_id] = q_i
                new_n[device_id] = n_i
                ratio = norm / raw_cumulative if raw_cumulative > 0 else 0.0
                solution.devices[device_id] = DeviceCollision(
                    device_id=device_id,
                    minislot=minislot,
                    tau=taus[device_id],
                    lambda_eff=norm,
                    q=q_i,
                    n=n_i,
                    share_ratio=ratio,
                )
            previous = (minislot, mean_tau, aggregate, gamma)

        q, residual_q = _relax(q, new_q, damping)
        n, residual_n = _relax(n, new_n, damping)
        residual = max(residual_q, residual_n)
        solution.iterations = iteration
        solution.residual = residual
        if residual < tol:
            solution.converged = True
            for device in solution.devices.values():
                shared = len(loads.minislots[device.minislot - 1]) > 1
                if shared and device.share_ratio > SHARE_RATIO_LIMIT:
                    message = (
                        f"device {device.device_id} carries {device.share_ratio:.3f} of the "
                        f"cumulative rate up to mini-slot {device.minislot}; per-device AD-F "
                        "differences may not be negligible"
                    )
                    solution.warnings.append(message)
                    LOGGER.warning(
                        "analytic.smsa.buffered.condition slot=%s device=%s ratio=%.4f",
                        loads.slot,
                        device.device_id,
                        device.share_ratio,
                    )
            return solution

    raise NonConvergenceError(f"buffered SMsA solver for slot {loads.slot}", max_iter, residual)
