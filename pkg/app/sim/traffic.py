"""
Arrival streams for each traffic process.

Every device draws from its own Philox substream keyed by (seed, device id),
so adding a device leaves the other streams untouched.
"""

import numpy as np

from app.core.model import (
    BernoulliPerFrame,
    Deterministic,
    DeviceSpec,
    Poisson,
    ProtocolParams,
    Trace,
    TrafficProcess,
)


POISSON_CHUNK = 4096


def device_rng(seed: int, device_id: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(seed, spawn_key=(device_id,))
    return np.random.Generator(np.random.Philox(sequence))


def _poisson(rate_per_tick: float, rng: np.random.Generator, horizon: int) -> np.ndarray:
    if rate_per_tick <= 0.0:
        return np.empty(0, dtype=np.int64)
    scale = 1.0 / rate_per_tick
    chunks = []
    clock = 0.0
    while clock < horizon:
        times = clock + np.cumsum(rng.exponential(scale, POISSON_CHUNK))
        clock = float(times[-1])
        chunks.append(times)
    times = np.concatenate(chunks)
    return np.floor(times[times < horizon]).astype(np.int64)


def _bernoulli(
    p: float,
    rng: np.random.Generator,
    horizon: int,
    frame_offset: int,
    frame_length: int,
) -> np.ndarray:
    frames = max(0, -(-(horizon - frame_offset) // frame_length))
    if frames == 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    hits = rng.random(frames) < p
    phases = rng.integers(0, frame_length, size=frames, dtype=np.int64)
    starts = frame_offset + np.arange(frames, dtype=np.int64) * frame_length
    ticks = (starts + phases)[hits]
    return ticks[ticks < horizon]


def generate_traffic(
    spec: TrafficProcess,
    seed: int,
    horizon: int,
    *,
    device_id: int = 0,
    rate_per_tick: float = 0.0,
    frame_offset: int = 0,
    frame_length: int = 1,
) -> np.ndarray:
    """
    Arrival ticks in [0, horizon), sorted.

    `rate_per_tick` backs Poisson processes without an explicit rate and
    Bernoulli processes without an explicit p; `frame_offset` and
    `frame_length` place the Bernoulli frames on the device's logical frames.
    """
    rng = device_rng(seed, device_id)
    if isinstance(spec, Poisson):
        rate = rate_per_tick if spec.rate_per_s is None else spec.rate_per_s / 1e9
        return _poisson(rate, rng, horizon)
    if isinstance(spec, BernoulliPerFrame):
        p = spec.p if spec.p is not None else min(1.0, rate_per_tick * frame_length)
        return _bernoulli(p, rng, horizon, frame_offset, frame_length)
    if isinstance(spec, Deterministic):
        if spec.phase >= horizon:
            return np.empty(0, dtype=np.int64)
        return np.arange(int(spec.phase), horizon, int(spec.period), dtype=np.int64)
    if isinstance(spec, Trace):
        ticks = np.asarray(spec.ticks, dtype=np.int64)
        return ticks[ticks < horizon]
    raise TypeError(f"unsupported traffic process {spec!r}")


def device_traffic(
    device: DeviceSpec,
    params: ProtocolParams,
    class_slot: int,
    seed: int,
    horizon: int,
) -> np.ndarray:
    cycle = params.cycle(device.priority)
    return generate_traffic(
        device.traffic,
        seed,
        horizon,
        device_id=device.id,
        rate_per_tick=device.rate_per_tick,
        frame_offset=(class_slot - 1) * params.t_s,
        frame_length=cycle * params.t_s,
    )
