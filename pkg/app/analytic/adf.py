"""
AD-F recursions for exclusive mini-slot assignment.

All quantities here are dimensionless: rates enter as per-frame expectations
(lambda * T_f) and AD-F values count logical frames.
"""

from dataclasses import dataclass, field
from typing import Literal

from app.analytic.loads import MiniSlotLoad
from app.core.errors import OverloadError
from app.core.model import TimeTick


@dataclass(slots=True)
class AdfVector:
    slot: int
    minislots: list[int] = field(default_factory=list)
    tau: list[float] = field(default_factory=list)
    lambda_eff: list[float] = field(default_factory=list)
    gamma: list[float] = field(default_factory=list)

    def tau_at(self, minislot: int) -> float:
        return self.tau[self.minislots.index(minislot)]

    def transmit_rates(self) -> list[float]:
        return list(self.lambda_eff)


def effective_rate(lambda_norm: float, tau: float) -> float:
    """Arrival rate net of packets dropped by replacement, per frame."""
    return lambda_norm / (1.0 + lambda_norm * (tau - 0.5))


def next_tau(
    tau: float,
    rate: float,
    gamma: float,
    *,
    slot: int | None = None,
    minislot: int | None = None,
) -> float:
    """
    AD-F of the next mini-slot from the current one.

    `rate` is the current mini-slot's (effective) per-frame rate and `gamma`
    the cumulative rate up to and including it.
    """
    if gamma >= 1.0:
        raise OverloadError("cumulative rate reached one arrival per frame", slot=slot, minislot=minislot)
    denominator = 1.0 - gamma - rate
    if denominator <= 0.0:
        raise OverloadError(
            f"AD-F recursion denominator {denominator:.6g} is not positive",
            slot=slot,
            minislot=minislot,
        )
    numerator = (
        -(1.0 - gamma) * rate * tau * tau / 2.0
        + (1.0 - gamma + rate) * tau
        - rate * (1.0 + gamma) / 2.0
    )
    return numerator / denominator


def _exclusive_norms(loads: MiniSlotLoad) -> list[tuple[int, float]]:
    if not loads.exclusive:
        raise ValueError(f"slot {loads.slot} has shared mini-slots; use the SMsA solver")
    return [(m, loads.norm(entries[0])) for m, entries in loads.occupied()]


def adf_no_buffer(loads: MiniSlotLoad) -> AdfVector:
    """Per mini-slot AD-F with packet replacement, starting from tau = 1."""
    result = AdfVector(slot=loads.slot)
    occupied = _exclusive_norms(loads)
    tau = 1.0
    gamma = 0.0
    for index, (minislot, norm) in enumerate(occupied):
        rate = effective_rate(norm, tau)
        gamma += rate
        result.minislots.append(minislot)
        result.tau.append(tau)
        result.lambda_eff.append(rate)
        result.gamma.append(gamma)
        if index + 1 < len(occupied):
            tau = next_tau(tau, rate, gamma, slot=loads.slot, minislot=minislot)
    return result


def buffered_base(norm: float) -> float:
    return 1.0 + norm / (2.0 * (2.0 - norm))


def buffered_prefactor(
    gamma: float,
    sensed_rate: float,
    own_rate: float,
    prefactor: Literal["sensed", "own"],
    *,
    slot: int | None = None,
    minislot: int | None = None,
) -> float:
    rate = sensed_rate if prefactor == "sensed" else own_rate
    denominator = 1.0 - gamma - rate
    if denominator <= 0.0:
        raise OverloadError(
            f"buffered prefactor denominator {denominator:.6g} is not positive",
            slot=slot,
            minislot=minislot,
        )
    return (1.0 - gamma) / denominator


def adf_buffered(
    loads: MiniSlotLoad, prefactor: Literal["sensed", "own"] = "sensed"
) -> AdfVector:
    """
    Per mini-slot AD-F with unbounded buffers.

    The first occupied mini-slot takes the closed-form base value; later ones
    scale the replacement-free recursion by the buffering prefactor. `lambda_eff`
    holds the raw rates since nothing is dropped.
    """
    result = AdfVector(slot=loads.slot)
    occupied = _exclusive_norms(loads)
    if not occupied:
        return result

    tau = buffered_base(occupied[0][1])
    gamma = 0.0
    for index, (minislot, norm) in enumerate(occupied):
        gamma += norm
        result.minislots.append(minislot)
        result.tau.append(tau)
        result.lambda_eff.append(norm)
        result.gamma.append(gamma)
        if index + 1 < len(occupied):
            hat = next_tau(tau, norm, gamma, slot=loads.slot, minislot=minislot)
            scale = buffered_prefactor(
                gamma,
                sensed_rate=norm,
                own_rate=occupied[index + 1][1],
                prefactor=prefactor,
                slot=loads.slot,
                minislot=minislot,
            )
            tau = scale * (hat - 1.0) + 1.0
    return result


def slot_idle_probability(loads: MiniSlotLoad, buffered: bool, adf=None) -> float:
    """
    Probability that no occupant transmits in the slot.

    Buffered exclusive slots use the raw rates; otherwise the solution's
    transmission rates (effective rates, or aggregated rates with collisions
    counted once).
    """
    if loads.empty:
        return 1.0
    if buffered and (adf is None or isinstance(adf, AdfVector)):
        busy = loads.total
    else:
        if adf is None:
            adf = adf_no_buffer(loads)
        busy = sum(adf.transmit_rates())
    idle = 1.0 - busy
    if idle < 0.0:
        raise OverloadError(f"slot idle probability {idle:.6g} is negative", slot=loads.slot)
    return idle


def adf_to_delay(tau: float, frame_ticks: float, t_x: int) -> TimeTick:
    """Access delay in ticks: (tau - 1) frames plus one transmission."""
    return TimeTick(round((tau - 1.0) * frame_ticks + t_x))
