import json
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from app import __version__
from app.core.errors import ResultsWriteError
from app.core.model import Scenario
from app.io.scenario_file import write_scenario


MANIFEST_NAME = "manifest.json"
INPUT_NAME = "scenario.scn"


@dataclass(slots=True)
class RunManifest:
    command: str
    scenario_id: str
    scenario_name: str
    source: str
    seeds: list[int] = field(default_factory=list)
    overrides: list[str] = field(default_factory=list)
    profile: str | None = None
    analysis: dict | None = None
    axes: list[str] | None = None
    grid: list[dict] | None = None
    outputs: list[str] = field(default_factory=list)
    tool_version: str = __version__
    numpy_version: str = np.__version__
    python_version: str = platform.python_version()


def write_manifest(directory: Path, manifest: RunManifest, scenario: Scenario | None = None) -> Path:
    """
    Writes manifest.json and, when given, the effective scenario next to the
    results, so that the directory alone reproduces the run.
    """
    path = directory / MANIFEST_NAME
    try:
        directory.mkdir(parents=True, exist_ok=True)
        if scenario is not None:
            write_scenario(scenario, directory / INPUT_NAME)
        path.write_text(json.dumps(asdict(manifest), indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ResultsWriteError(path, exc) from exc
    return path


def read_manifest(directory: Path) -> dict:
    return json.loads((directory / MANIFEST_NAME).read_text(encoding="utf-8"))
