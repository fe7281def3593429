"""
Exact AD-F and idle probability for tiny one-slot scenarios.

With a one-slot frame and Bernoulli-per-frame arrivals the queue contents at
slot starts form a finite Markov chain. Each frame every device independently
sees no arrival, an early arrival (before its sensing window, so it competes
in the same slot) or a late one.
"""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from app.config import config
from app.core.errors import ScenarioSemanticError, StateSpaceOverflow
from app.core.model import BernoulliPerFrame, Scenario
from app.core.schedule import expand_schedule


LOGGER = logging.getLogger(__name__)

MAX_DEVICES = 3

NONE, EARLY, LATE = 0, 1, 2


@dataclass(slots=True)
class OracleResult:
    adf: dict[int, float] = field(default_factory=dict)
    success_rate: dict[int, float] = field(default_factory=dict)
    idle_probability: float = 1.0
    states: int = 0
    overflow_mass: float = 0.0


@dataclass(frozen=True, slots=True)
class _Device:
    device_id: int
    minislot: int
    p: float
    early: float


def _devices(scenario: Scenario) -> list[_Device]:
    params = scenario.params
    if len(scenario.devices) > MAX_DEVICES:
        raise ScenarioSemanticError(
            f"oracle handles at most {MAX_DEVICES} devices", field="devices"
        )
    if params.r_l != 1 or params.synccs or params.smsa:
        raise ScenarioSemanticError(
            "oracle needs a one-slot frame without SyncCS or SMsA", field="protocol"
        )
    if expand_schedule(scenario).shared_cells():
        raise ScenarioSemanticError("oracle needs exclusive mini-slots", field="assignment")

    devices = []
    for spec in scenario.devices:
        if not isinstance(spec.traffic, BernoulliPerFrame):
            raise ScenarioSemanticError(
                f"device {spec.id} must use bernoulli traffic", field=f"devices.{spec.id}.traffic"
            )
        p = spec.traffic.p
        if p is None:
            p = min(1.0, spec.rate_per_tick * params.t_s)
        minislot = scenario.assignment.for_device(spec.id).minislot
        devices.append(
            _Device(
                device_id=spec.id,
                minislot=minislot,
                p=p,
                early=params.window_offset(minislot) / params.t_s,
            )
        )
    return sorted(devices, key=lambda device: device.minislot)


def _outcomes(devices: list[_Device]):
    """Every joint arrival outcome of one frame with its probability."""
    choices = []
    for device in devices:
        choices.append(
            [
                (NONE, 1.0 - device.p),
                (EARLY, device.p * device.early),
                (LATE, device.p * (1.0 - device.early)),
            ]
        )
    for combo in itertools.product(*choices):
        probability = float(np.prod([weight for _, weight in combo]))
        if probability > 0.0:
            yield tuple(kind for kind, _ in combo), probability


def _winner(holding: tuple[int, ...]) -> int | None:
    for position, count in enumerate(holding):
        if count:
            return position
    return None


def _stationary(transition: np.ndarray) -> np.ndarray:
    size = transition.shape[0]
    system = transition.T - np.eye(size)
    system[-1, :] = 1.0
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    return linalg.solve(system, rhs)


def _no_buffer(devices: list[_Device], result: OracleResult) -> None:
    states = list(itertools.product((0, 1), repeat=len(devices)))
    index = {state: position for position, state in enumerate(states)}
    outcomes = list(_outcomes(devices))
    size = len(states)

    transition = np.zeros((size, size))
    steps = []
    for state in states:
        for kinds, probability in outcomes:
            holding = tuple(
                1 if held or kind == EARLY else 0 for held, kind in zip(state, kinds)
            )
            winner = _winner(holding)
            following = tuple(
                1 if (holding[i] and i != winner) or kinds[i] == LATE else 0
                for i in range(len(devices))
            )
            transition[index[state], index[following]] += probability
            steps.append((state, kinds, probability, holding, winner, following))
    pi = _stationary(transition)

    # survive[i][x]: chance that device i's packet waiting at the start of a
    # frame in state x is eventually transmitted
    survive = []
    for i in range(len(devices)):
        matrix = np.eye(size)
        rhs = np.zeros(size)
        for state, kinds, probability, holding, winner, following in steps:
            if not state[i] or kinds[i] == EARLY:
                continue
            if winner == i:
                rhs[index[state]] += probability
            elif kinds[i] != LATE:
                matrix[index[state], index[following]] -= probability
        survive.append(linalg.solve(matrix, rhs))

    reward = np.zeros(len(devices))
    successes = np.zeros(len(devices))
    idle = 0.0
    for state, kinds, probability, holding, winner, following in steps:
        weight = pi[index[state]] * probability
        if winner is None:
            idle += weight
            continue
        successes[winner] += weight
        for i, held in enumerate(holding):
            if not held:
                continue
            if i == winner:
                reward[i] += weight
            elif kinds[i] != LATE:
                reward[i] += weight * survive[i][index[following]]
    _finish(devices, result, reward, successes, idle, size)


def _buffered(devices: list[_Device], result: OracleResult, cap: int) -> None:
    states = list(itertools.product(range(cap + 1), repeat=len(devices)))
    index = {state: position for position, state in enumerate(states)}
    outcomes = list(_outcomes(devices))
    size = len(states)

    transition = np.zeros((size, size))
    overflow = np.zeros(size)
    steps = []
    for state in states:
        for kinds, probability in outcomes:
            holding = tuple(
                queued + (1 if kind == EARLY else 0) for queued, kind in zip(state, kinds)
            )
            winner = _winner(holding)
            following = []
            spilled = False
            for i, kind in enumerate(kinds):
                length = state[i] + (0 if kind == NONE else 1) - (1 if i == winner else 0)
                if length > cap:
                    spilled = True
                    length = cap
                following.append(length)
            following = tuple(following)
            transition[index[state], index[following]] += probability
            if spilled:
                overflow[index[state]] += probability
            steps.append((state, probability, holding, winner))
    pi = _stationary(transition)
    result.overflow_mass = float(pi @ overflow)
    if result.overflow_mass > config.oracle_overflow_mass:
        raise StateSpaceOverflow(
            f"queue cap {cap} exceeded with stationary mass {result.overflow_mass:.3e}"
        )

    reward = np.zeros(len(devices))
    successes = np.zeros(len(devices))
    idle = 0.0
    for state, probability, holding, winner in steps:
        weight = pi[index[state]] * probability
        if winner is None:
            idle += weight
            continue
        successes[winner] += weight
        # every packet eligible at the decision sees one more occurrence
        reward += weight * np.asarray(holding, dtype=float)
    _finish(devices, result, reward, successes, idle, size)


def _finish(devices, result, reward, successes, idle, size) -> None:
    result.states = size
    result.idle_probability = float(idle)
    for position, device in enumerate(devices):
        rate = float(successes[position])
        result.success_rate[device.device_id] = rate
        result.adf[device.device_id] = float(reward[position]) / rate if rate > 0 else float("nan")


def brute_force_oracle(scenario: Scenario, *, queue_cap: int | None = None) -> OracleResult:
    """
    Exact stationary mean AD-F per device and slot idle probability.

    Without buffers each device holds at most one packet; with buffers the
    queue is capped at `queue_cap` (config.oracle_queue_cap by default) and
    StateSpaceOverflow is raised when the chain puts noticeable mass on the cap.
    """
    devices = _devices(scenario)
    result = OracleResult()
    if not devices:
        return result
    if scenario.params.buffered:
        _buffered(devices, result, config.oracle_queue_cap if queue_cap is None else queue_cap)
    else:
        _no_buffer(devices, result)
    LOGGER.info(
        "metrics.oracle.complete scenario=%s states=%s idle=%.6f overflow=%.3e",
        scenario.identity(),
        result.states,
        result.idle_probability,
        result.overflow_mass,
    )
    return result
