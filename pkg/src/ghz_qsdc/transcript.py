"""Append-only session transcript with a line-delimited JSON encoding."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

PARTY_NAMES = ("alice", "bob", "charlie")


def party_name(i: int) -> str:
    return PARTY_NAMES[i] if i < len(PARTY_NAMES) else f"party{i}"


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    public: bool
    data: dict[str, Any]

    def to_json(self) -> str:
        return json.dumps({"seq": self.seq, "kind": self.kind, "public": self.public, "data": self.data})


@dataclass
class Transcript:
    events: list[Event] = field(default_factory=list)

    def append(self, kind: str, data: dict[str, Any], public: bool = True) -> Event:
        ev = Event(len(self.events), kind, public, data)
        self.events.append(ev)
        return ev

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def of_kind(self, kind: str) -> list[Event]:
        return [ev for ev in self.events if ev.kind == kind]

    def public_events(self) -> list[Event]:
        return [ev for ev in self.events if ev.public]

    def to_jsonl(self) -> str:
        return "".join(ev.to_json() + "\n" for ev in self.events)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.to_jsonl(), encoding="utf-8")
        return path

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        events = []
        for line in text.splitlines():
            if line.strip():
                raw = json.loads(line)
                events.append(Event(raw["seq"], raw["kind"], raw["public"], raw["data"]))
        return cls(events)
