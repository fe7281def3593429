import logging
from pathlib import Path
from typing import Iterable

import yaml
from pydantic import ValidationError

from app.config import config
from app.core.errors import ScenarioSemanticError, ScenarioSyntaxError
from app.core.model import Scenario
from app.core.validation import validate_scenario
from app.io.schema import ScenarioDocument, from_scenario, to_scenario


LOGGER = logging.getLogger(__name__)


def read_source(source: str | Path) -> str:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if "\n" not in source and source.endswith((".scn", ".yaml", ".yml")):
        return Path(source).read_text(encoding="utf-8")
    return source


def _marks(node, path=(), found=None) -> dict[tuple, int]:
    """1-based line of every mapping key and sequence item, keyed by path."""
    found = {} if found is None else found
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            child = path + (key.value,)
            found[child] = key.start_mark.line + 1
            _marks(value, child, found)
    elif isinstance(node, yaml.SequenceNode):
        for position, value in enumerate(node.value):
            child = path + (position,)
            found[child] = value.start_mark.line + 1
            _marks(value, child, found)
    return found


def _line_for(marks: dict[tuple, int], location: tuple) -> int | None:
    location = tuple(location)
    while location:
        if location in marks:
            return marks[location]
        location = location[:-1]
    return None


def parse_document(text: str) -> tuple[dict, dict[tuple, int]]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ScenarioSyntaxError(
            str(exc.problem or exc),
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        ) from exc
    if not isinstance(data, dict):
        raise ScenarioSyntaxError("scenario document must be a mapping", line=1, column=1)
    return data, _marks(node) if node is not None else {}


def _set(target, keys: list[str], value) -> None:
    head, rest = keys[0], keys[1:]
    if isinstance(target, list):
        if head == "*":
            items = target
        else:
            wanted = int(head)
            items = [
                item for item in target if isinstance(item, dict) and item.get("id") == wanted
            ] or [target[wanted]]
        for item in items:
            if rest:
                _set(item, rest, value)
        return
    if not rest:
        target[head] = value
        return
    _set(target.setdefault(head, {}), rest, value)


def apply_overrides(data: dict, overrides: Iterable[str]) -> dict:
    """
    Applies `dotted.key=value` overrides in place.

    A `*` segment addresses every list element; a numeric segment picks the
    element with that id, or that position when elements carry no id.
    """
    for override in overrides:
        key, separator, raw = override.partition("=")
        if not separator or not key.strip():
            raise ScenarioSemanticError(f"override {override!r} is not key=value", field="override")
        try:
            _set(data, key.strip().split("."), yaml.safe_load(raw))
        except (IndexError, ValueError, TypeError, AttributeError) as exc:
            raise ScenarioSemanticError(str(exc), field=key.strip()) from exc
    return data


def _document_path(data, location: tuple) -> tuple:
    """Error location reduced to the keys present in the document; union tags drop out."""
    path = []
    target = data
    for part in location:
        if isinstance(target, dict) and part in target:
            target = target[part]
        elif isinstance(target, list) and isinstance(part, int) and 0 <= part < len(target):
            target = target[part]
        else:
            continue
        path.append(part)
    return tuple(path)


def _drop(data, path: tuple) -> bool:
    if not path:
        return False
    target = data
    for part in path[:-1]:
        target = target[part]
    if not isinstance(target, dict) or path[-1] not in target:
        return False
    del target[path[-1]]
    return True


def build_scenario(
    data: dict,
    marks: dict[tuple, int] | None = None,
    *,
    strict: bool | None = None,
    validate: bool = True,
) -> Scenario:
    """
    Scenario from a document dict; unknown keys fail in strict mode and are
    dropped with a warning otherwise.
    """
    marks = marks or {}
    strict = config.strict_scenarios if strict is None else strict
    while True:
        try:
            document = ScenarioDocument.model_validate(data)
            break
        except ValidationError as exc:
            problems = exc.errors()
            extras = [problem for problem in problems if problem["type"] == "extra_forbidden"]
            if strict or len(extras) != len(problems):
                first = next(
                    (problem for problem in problems if problem["type"] != "extra_forbidden"),
                    problems[0],
                )
                location = tuple(first["loc"])
                if first["type"] == "extra_forbidden":
                    location = _document_path(data, location)
                raise ScenarioSemanticError(
                    first["msg"],
                    field=".".join(str(part) for part in location),
                    line=_line_for(marks, location),
                ) from exc
            for problem in extras:
                path = _document_path(data, tuple(problem["loc"]))
                field = ".".join(str(part) for part in path)
                line = _line_for(marks, path)
                if not _drop(data, path):
                    raise ScenarioSemanticError(problem["msg"], field=field, line=line) from exc
                LOGGER.warning("scenario.parse.unknown_key field=%s line=%s", field, line)

    try:
        scenario = to_scenario(document)
    except ValueError as exc:
        raise ScenarioSemanticError(str(exc)) from exc

    if validate:
        report = validate_scenario(scenario)
        if not report.ok:
            first = report.errors[0]
            raise ScenarioSemanticError(
                "; ".join(f"[{issue.code}] {issue.message} ({issue.where})" for issue in report.errors),
                field=first.where or None,
                report=report,
            )
    return scenario


def parse(
    source: str | Path,
    *,
    overrides: Iterable[str] = (),
    strict: bool | None = None,
    validate: bool = True,
) -> Scenario:
    """Reads, overrides and validates a scenario from a path or document text."""
    data, marks = parse_document(read_source(source))
    apply_overrides(data, overrides)
    return build_scenario(data, marks, strict=strict, validate=validate)


def emit(scenario: Scenario) -> str:
    return yaml.safe_dump(from_scenario(scenario), sort_keys=False, default_flow_style=None)


def write_scenario(scenario: Scenario, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(emit(scenario), encoding="utf-8")
    return path
