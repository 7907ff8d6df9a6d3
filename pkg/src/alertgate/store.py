"""Append-only record log with snapshots.

Every state change is appended as a typed record before it becomes visible;
loading the latest snapshot and replaying the log suffix reconstructs the
exact state. Two backends share the contract: an in-memory store for tests
and simulations, and a file store (newline-delimited JSON plus a snapshot
file) for the service process.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterator, Mapping

from .clock import format_ts, parse_ts
from .errors import SerializationError, StorageFull

log = logging.getLogger(__name__)

SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class Record:
    seq: int
    kind: str
    at: datetime
    data: dict

    def to_line(self) -> str:
        try:
            return json.dumps(
                {"seq": self.seq, "kind": self.kind, "at": format_ts(self.at), "data": self.data},
                sort_keys=True,
                separators=(",", ":"),
            )
        except (TypeError, ValueError) as exc:
            raise SerializationError(str(exc)) from exc

    @classmethod
    def from_line(cls, line: str) -> "Record":
        doc = json.loads(line)
        return cls(seq=doc["seq"], kind=doc["kind"], at=parse_ts(doc["at"]), data=doc["data"])


class MemoryStore:
    def __init__(self) -> None:
        self._records: list[Record] = []
        self._snapshot: tuple[int, dict] | None = None

    @property
    def last_seq(self) -> int:
        return self._records[-1].seq if self._records else 0

    def append(self, kind: str, at: datetime, data: dict) -> Record:
        record = Record(self.last_seq + 1, kind, at, data)
        record.to_line()
        self._records.append(record)
        return record

    def records(self, after_seq: int = 0) -> Iterator[Record]:
        for record in self._records:
            if record.seq > after_seq:
                yield record

    def write_snapshot(self, state: dict, seq: int, taken_at: datetime) -> None:
        self._snapshot = (seq, json.loads(json.dumps(state)))

    def read_snapshot(self) -> tuple[int, dict] | None:
        return self._snapshot

    def truncate_to(self, seq: int) -> None:
        """Drop every record past seq. Models losing unflushed work in crash
        tests; the file store has no counterpart."""
        self._records = [r for r in self._records if r.seq <= seq]


class FileStore:
    def __init__(self, data_dir: str | Path) -> None:
        self._dir = Path(data_dir)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._log_path = self._dir / "wal.jsonl"
        self._snapshot_path = self._dir / "snapshot.json"
        self._last_seq = 0
        if self._log_path.exists():
            with self._log_path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._last_seq = Record.from_line(line).seq
        else:
            snap = self.read_snapshot()
            if snap is not None:
                self._last_seq = snap[0]
        self._fh = self._log_path.open("a", encoding="utf-8")

    @property
    def last_seq(self) -> int:
        return self._last_seq

    def append(self, kind: str, at: datetime, data: dict) -> Record:
        record = Record(self._last_seq + 1, kind, at, data)
        line = record.to_line()
        try:
            self._fh.write(line + "\n")
            self._fh.flush()
        except OSError as exc:
            raise StorageFull(str(exc)) from exc
        self._last_seq = record.seq
        return record

    def records(self, after_seq: int = 0) -> Iterator[Record]:
        if not self._log_path.exists():
            return
        with self._log_path.open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = Record.from_line(line)
                if record.seq > after_seq:
                    yield record

    def write_snapshot(self, state: dict, seq: int, taken_at: datetime) -> None:
        doc = {
            "version": SNAPSHOT_VERSION,
            "seq": seq,
            "taken_at": format_ts(taken_at),
            "state": state,
        }
        tmp = self._snapshot_path.with_suffix(".tmp")
        try:
            tmp.write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")
            tmp.replace(self._snapshot_path)
        except OSError as exc:
            raise StorageFull(str(exc)) from exc

    def read_snapshot(self) -> tuple[int, dict] | None:
        if not self._snapshot_path.exists():
            return None
        doc = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
        if doc.get("version") != SNAPSHOT_VERSION:
            raise SerializationError(f"unsupported snapshot version {doc.get('version')}")
        return doc["seq"], doc["state"]

    def close(self) -> None:
        self._fh.close()
