import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from app.config import config
from app.core.errors import InsufficientData
from app.sim.engine import RawCounters


LOGGER = logging.getLogger(__name__)

REPLICATION_CI_MINIMUM = 20


@dataclass(frozen=True, slots=True)
class Estimate:
    mean: float
    ci_low: float
    ci_high: float
    samples: int = 0
    reliable: bool = True

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high


@dataclass(slots=True)
class DeviceEstimate:
    device_id: int
    adf: Estimate
    ad_ticks: Estimate
    delay_ticks: Estimate
    collision_probability: Estimate
    replacement_rate: float
    arrivals: int
    successes: int
    transmissions: int
    collided: int


@dataclass(slots=True)
class SlotEstimate:
    slot: int
    idle_fraction: Estimate

    @property
    def throughput(self) -> float:
        return 1.0 - self.idle_fraction.mean


@dataclass(slots=True)
class SimReport:
    scenario_id: str
    replications: int
    horizon_slots: int
    seeds: list[int] = field(default_factory=list)
    devices: dict[int, DeviceEstimate] = field(default_factory=dict)
    slots: dict[int, SlotEstimate] = field(default_factory=dict)
    slot_ticks: Estimate | None = None
    frame_ticks: Estimate | None = None
    collision_events: int = 0
    elapsed_ticks: int = 0
    insufficient: list[int] = field(default_factory=list)

    def require_data(self) -> None:
        if self.insufficient:
            raise InsufficientData(
                f"devices {self.insufficient} transmitted fewer than "
                f"{config.min_transmissions} packets after warm-up"
            )


def _ratio(
    numerator: np.ndarray,
    denominator: np.ndarray,
    *,
    replicated: bool,
    confidence: float,
    batches: int,
    reliable: bool = True,
    scale: float = 1.0,
) -> Estimate:
    """
    Ratio-of-sums estimate with a t interval over groups.

    Rows are replications and columns are statistic bins after warm-up. Groups
    are whole replications when there are enough of them, batches of pooled
    bins otherwise.
    """
    total = float(denominator.sum())
    mean = float(numerator.sum()) / total * scale if total > 0 else math.nan
    if replicated:
        group_num, group_den = numerator.sum(axis=1), denominator.sum(axis=1)
    else:
        pooled_num, pooled_den = numerator.sum(axis=0), denominator.sum(axis=0)
        count = max(1, min(batches, len(pooled_num)))
        group_num = np.array([chunk.sum() for chunk in np.array_split(pooled_num, count)])
        group_den = np.array([chunk.sum() for chunk in np.array_split(pooled_den, count)])

    mask = group_den > 0
    ratios = group_num[mask] / group_den[mask] * scale
    if len(ratios) < 2:
        half = math.nan
    else:
        spread = float(np.std(ratios, ddof=1))
        quantile = float(stats.t.ppf((1.0 + confidence) / 2.0, len(ratios) - 1))
        half = quantile * spread / math.sqrt(len(ratios))
    return Estimate(mean, mean - half, mean + half, samples=int(total), reliable=reliable)


def summarize(
    runs: Sequence[RawCounters],
    *,
    warmup_fraction: float | None = None,
    confidence: float | None = None,
) -> SimReport:
    """
    Point estimates and confidence intervals over one or more replications.

    The first `warmup_fraction` of statistic bins is discarded. Devices with
    fewer than `config.min_transmissions` successes keep their estimates but
    are flagged unreliable.
    """
    if not runs:
        raise InsufficientData("no completed runs to summarize")
    warmup_fraction = config.warmup_fraction if warmup_fraction is None else warmup_fraction
    confidence = config.confidence if confidence is None else confidence
    first = runs[0]
    bins = first.bins
    skip = min(bins - 1, math.ceil(warmup_fraction * bins))
    replicated = len(runs) >= REPLICATION_CI_MINIMUM

    def stack(name: str) -> np.ndarray:
        return np.stack([getattr(run, name)[skip:] for run in runs])

    arrivals = stack("arrivals")
    replacements = stack("replacements")
    transmissions = stack("transmissions")
    collided = stack("collided")
    successes = stack("successes")
    adf_sum = stack("adf_sum")
    ad_sum = stack("ad_sum")
    delay_sum = stack("delay_sum")
    idle_slots = stack("idle_slots")
    slot_counts = stack("slot_counts")
    duration = stack("duration")
    slots = stack("slots")

    options = dict(replicated=replicated, confidence=confidence, batches=config.batch_count)
    report = SimReport(
        scenario_id=first.scenario_id,
        replications=len(runs),
        horizon_slots=first.horizon_slots,
        seeds=[run.seed for run in runs],
        collision_events=sum(run.collision_events for run in runs),
        elapsed_ticks=sum(run.elapsed_ticks for run in runs),
    )

    for column, device_id in enumerate(first.device_ids):
        done = int(successes[:, :, column].sum())
        reliable = done >= config.min_transmissions
        if not reliable:
            report.insufficient.append(device_id)
            LOGGER.warning(
                "metrics.summary.insufficient device=%s successes=%s minimum=%s",
                device_id,
                done,
                config.min_transmissions,
            )
        arrived = int(arrivals[:, :, column].sum())
        report.devices[device_id] = DeviceEstimate(
            device_id=device_id,
            adf=_ratio(adf_sum[:, :, column], successes[:, :, column], reliable=reliable, **options),
            ad_ticks=_ratio(ad_sum[:, :, column], successes[:, :, column], reliable=reliable, **options),
            delay_ticks=_ratio(
                delay_sum[:, :, column], successes[:, :, column], reliable=reliable, **options
            ),
            collision_probability=_ratio(
                collided[:, :, column], transmissions[:, :, column], reliable=reliable, **options
            ),
            replacement_rate=(
                int(replacements[:, :, column].sum()) / arrived if arrived else 0.0
            ),
            arrivals=arrived,
            successes=done,
            transmissions=int(transmissions[:, :, column].sum()),
            collided=int(collided[:, :, column].sum()),
        )

    for g in range(first.r_l):
        report.slots[g + 1] = SlotEstimate(
            slot=g + 1,
            idle_fraction=_ratio(idle_slots[:, :, g], slot_counts[:, :, g], **options),
        )

    report.slot_ticks = _ratio(duration, slots, **options)
    report.frame_ticks = _ratio(duration, slots, scale=float(first.r_l), **options)
    LOGGER.info(
        "metrics.summary.complete scenario=%s replications=%s devices=%s insufficient=%s",
        report.scenario_id,
        report.replications,
        len(report.devices),
        len(report.insufficient),
    )
    return report
