import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Literal

from app.core.errors import ResultsWriteError


EventKind = Literal[
    "slot_start",
    "arrival",
    "replacement",
    "tx_start",
    "success",
    "collision",
    "slot_end",
]

FIELD_ORDER = ("tick", "kind", "slot", "device", "packet", "detail")


@dataclass(frozen=True, slots=True)
class EventRecord:
    tick: int
    kind: EventKind
    slot: int
    device: int | None = None
    packet: int | None = None
    # global slot for slot_start, slot duration for slot_end, mini-slot for tx_start
    detail: int | None = None

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in FIELD_ORDER}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), separators=(",", ":"))


@dataclass(slots=True)
class EventLog:
    records: list[EventRecord] = field(default_factory=list)
    enabled: bool = True

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[EventRecord]:
        return iter(self.records)

    def extend_slot(self, batch: list[EventRecord]) -> None:
        """Appends one slot's records ordered by tick, ties kept in emission order."""
        if not self.enabled:
            return
        self.records.extend(sorted(batch, key=lambda record: record.tick))

    def of_kind(self, kind: EventKind) -> list[EventRecord]:
        return [record for record in self.records if record.kind == kind]

    def lines(self) -> Iterator[str]:
        for record in self.records:
            yield record.to_json()

    def to_jsonl(self, path: Path) -> Path:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8", newline="\n") as handle:
                for line in self.lines():
                    handle.write(line)
                    handle.write("\n")
        except OSError as exc:
            raise ResultsWriteError(path, exc) from exc
        return path

    @classmethod
    def from_jsonl(cls, path: Path) -> "EventLog":
        records = []
        with path.open(encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    records.append(EventRecord(**json.loads(line)))
        return cls(records=records)
