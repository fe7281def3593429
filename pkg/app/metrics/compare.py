import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.analytic.report import AnalyticReport
from app.config import config
from app.core.errors import ScenarioMismatch, ScenarioSemanticError
from app.metrics.summary import Estimate, SimReport


LOGGER = logging.getLogger(__name__)

PROFILE_DIR = Path(__file__).with_name("profiles")


class ToleranceModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["relative", "absolute"]
    tolerance: float = Field(ge=0.0)


class ProfileModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = "custom"
    quantities: dict[str, ToleranceModel]
    mandatory: list[str] | None = None


@dataclass(frozen=True, slots=True)
class ToleranceProfile:
    name: str
    tolerances: dict[str, ToleranceModel]
    mandatory: tuple[str, ...]

    def accepts(self, quantity: str, abs_err: float, rel_err: float) -> bool:
        rule = self.tolerances[quantity]
        error = rel_err if rule.kind == "relative" else abs_err
        return error <= rule.tolerance


def load_profile(source: str | Path | None = None) -> ToleranceProfile:
    """
    Reads a tolerance profile by shipped name ("default", "strict") or path.
    """
    if source is None:
        source = "default"
    path = Path(source)
    if not path.suffix:
        path = PROFILE_DIR / f"{source}.yaml"
    try:
        model = ProfileModel.model_validate(yaml.safe_load(path.read_text(encoding="utf-8")))
    except (OSError, yaml.YAMLError) as exc:
        raise ScenarioSemanticError(str(exc), field="profile") from exc
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ScenarioSemanticError(first["msg"], field=f"profile.{location}") from exc
    mandatory = model.mandatory if model.mandatory is not None else config.mandatory_quantities
    return ToleranceProfile(
        name=model.name,
        tolerances=dict(model.quantities),
        mandatory=tuple(quantity for quantity in mandatory if quantity in model.quantities),
    )


@dataclass(frozen=True, slots=True)
class ComparisonRow:
    quantity: str
    subject: str
    analytic: float
    simulated: float
    ci_low: float
    ci_high: float
    abs_err: float
    rel_err: float
    verdict: Literal["pass", "fail", "insufficient"]
    mandatory: bool


@dataclass(slots=True)
class ComparisonReport:
    scenario_id: str
    profile: str
    rows: list[ComparisonRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.verdict == "pass" for row in self.rows if row.mandatory)

    @property
    def failures(self) -> list[ComparisonRow]:
        return [row for row in self.rows if row.mandatory and row.verdict != "pass"]


def errors(analytic: float, simulated: float) -> tuple[float, float]:
    abs_err = abs(analytic - simulated)
    if analytic == 0.0:
        return abs_err, 0.0 if abs_err == 0.0 else math.inf
    return abs_err, abs_err / abs(analytic)


def _row(
    profile: ToleranceProfile, quantity: str, subject: str, analytic: float, estimate: Estimate
) -> ComparisonRow:
    abs_err, rel_err = errors(analytic, estimate.mean)
    if math.isnan(estimate.mean) or not estimate.reliable:
        verdict = "insufficient"
    else:
        verdict = "pass" if profile.accepts(quantity, abs_err, rel_err) else "fail"
    return ComparisonRow(
        quantity=quantity,
        subject=subject,
        analytic=analytic,
        simulated=estimate.mean,
        ci_low=estimate.ci_low,
        ci_high=estimate.ci_high,
        abs_err=abs_err,
        rel_err=rel_err,
        verdict=verdict,
        mandatory=quantity in profile.mandatory,
    )


def compare(
    analytic: AnalyticReport, sim: SimReport, profile: ToleranceProfile | None = None
) -> ComparisonReport:
    """Per-quantity verdicts of simulation against analysis for one scenario."""
    if analytic.scenario_id != sim.scenario_id:
        raise ScenarioMismatch(
            f"analytic report is for {analytic.scenario_id}, simulation for {sim.scenario_id}"
        )
    profile = profile or load_profile()
    report = ComparisonReport(scenario_id=analytic.scenario_id, profile=profile.name)

    def add(quantity: str, subject: str, value: float, estimate: Estimate | None) -> None:
        if estimate is None or quantity not in profile.tolerances:
            return
        report.rows.append(_row(profile, quantity, subject, value, estimate))

    for device_id, expected in sorted(analytic.devices.items()):
        measured = sim.devices.get(device_id)
        if measured is None:
            continue
        subject = f"device:{device_id}"
        add("adf", subject, expected.adf, measured.adf)
        add("ad", subject, float(expected.ad_ticks), measured.ad_ticks)
        add("collision_probability", subject, expected.collision_probability, measured.collision_probability)

    for slot, expected in sorted(analytic.slots.items()):
        if expected.solver == "empty":
            continue
        measured = sim.slots.get(slot)
        add(
            "idle_probability",
            f"slot:{slot}",
            expected.idle_probability,
            None if measured is None else measured.idle_fraction,
        )

    if analytic.expected_frame is not None:
        add("frame_length", "frame", analytic.expected_frame, sim.frame_ticks)

    LOGGER.info(
        "metrics.compare.complete scenario=%s profile=%s rows=%s failures=%s passed=%s",
        report.scenario_id,
        report.profile,
        len(report.rows),
        len(report.failures),
        report.passed,
    )
    return report
