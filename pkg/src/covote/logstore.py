"""Append-only command log: newline-delimited JSON records with a version
header, gapless sequence numbers, and fsync on decision entries."""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from typing import Optional

LOG_VERSION = 1
KINDS = ("REQUEST", "SHARE_RECEIPT", "PARTIAL_TALLY", "DECISION", "AUDIT")


@dataclass(frozen=True)
class CommandLogEntry:
    seq: int
    timestamp: float
    kind: str
    election_id: str
    payload: dict

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "ts": self.timestamp,
            "kind": self.kind,
            "election": self.election_id,
            "payload": self.payload,
        }

    @staticmethod
    def from_dict(d: dict) -> "CommandLogEntry":
        return CommandLogEntry(
            seq=int(d["seq"]),
            timestamp=float(d["ts"]),
            kind=d["kind"],
            election_id=d["election"],
            payload=d["payload"],
        )


class CommandLog:
    """Single-writer durable log. Entries are immutable once appended; a
    reopened log resumes numbering where it left off."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self._entries: list[CommandLogEntry] = []
        self._load()
        if self._fh is None:
            os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
            self._fh = open(path, "a", encoding="utf-8")
            if not self._entries:
                self._fh.write(json.dumps({"log_version": LOG_VERSION}) + "\n")
                self._fh.flush()

    def _load(self) -> None:
        self._fh = None
        if not os.path.exists(self.path):
            return
        with open(self.path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        if lines:
            header = json.loads(lines[0])
            if header.get("log_version") != LOG_VERSION:
                raise ValueError(f"unsupported log version {header!r}")
        for line in lines[1:]:
            if not line.strip():
                continue
            entry = CommandLogEntry.from_dict(json.loads(line))
            if entry.seq != len(self._entries) + 1:
                raise ValueError("sequence gap in command log")
            self._entries.append(entry)

    def append(self, kind: str, election_id: str, payload: dict) -> CommandLogEntry:
        if kind not in KINDS:
            raise ValueError(f"unknown log kind {kind!r}")
        with self._lock:
            entry = CommandLogEntry(
                seq=len(self._entries) + 1,
                timestamp=time.time(),
                kind=kind,
                election_id=election_id,
                payload=payload,
            )
            self._entries.append(entry)
            self._fh.write(json.dumps(entry.to_dict(), sort_keys=True) + "\n")
            self._fh.flush()
            if kind == "DECISION":
                os.fsync(self._fh.fileno())
            return entry

    def read(
        self,
        election_id: Optional[str] = None,
        kind: Optional[str] = None,
        after: int = 0,
    ) -> list[CommandLogEntry]:
        with self._lock:
            return [
                e
                for e in self._entries
                if e.seq > after
                and (election_id is None or e.election_id == election_id)
                and (kind is None or e.kind == kind)
            ]

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None
