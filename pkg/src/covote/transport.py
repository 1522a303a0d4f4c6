"""Message transport abstraction shared by the simulated network, the
in-process threaded network, and the TCP network.

Every protocol instance is keyed by an InstanceTag so concurrent elections
and primitives never cross-contaminate. Payloads are JSON-compatible dicts
with a "type" field; crypto values travel hex-encoded through the canonical
byte encodings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Protocol

DAEMON_ID = 0  # reserved process id for the coordination daemon

WIRE_VERSION = 1


@dataclass(frozen=True)
class InstanceTag:
    election: str
    kind: str  # e.g. "brb-proof", "aba", "avss", "propose", "tally"
    origin: int  # originating voter index, 0 when daemon-scoped

    def key(self) -> tuple:
        return (self.election, self.kind, self.origin)


@dataclass(frozen=True)
class Message:
    sender: int
    recipient: int
    tag: InstanceTag
    payload: dict


def encode_message(msg: Message) -> bytes:
    return json.dumps(
        {
            "v": WIRE_VERSION,
            "from": msg.sender,
            "to": msg.recipient,
            "tag": [msg.tag.election, msg.tag.kind, msg.tag.origin],
            "payload": msg.payload,
        },
        separators=(",", ":"),
        sort_keys=True,
    ).encode()


def decode_message(data: bytes) -> Message:
    obj = json.loads(data.decode())
    if obj.get("v") != WIRE_VERSION:
        raise ValueError(f"unsupported wire version {obj.get('v')!r}")
    election, kind, origin = obj["tag"]
    return Message(
        sender=obj["from"],
        recipient=obj["to"],
        tag=InstanceTag(election, kind, origin),
        payload=obj["payload"],
    )


class Transport(Protocol):
    def send(self, msg: Message) -> None: ...


class Clock(Protocol):
    def now(self) -> float: ...

    def call_later(self, delay: float, fn: Callable[[], None]) -> None: ...


@dataclass
class ProtocolContext:
    """Send-side context handed to a protocol instance: identity, system
    parameters, and the transport bound to one instance tag."""

    transport: Transport
    tag: InstanceTag
    me: int
    n: int
    f: int
    _sent_once: set = field(default_factory=set)

    def send(self, to: int, payload: dict) -> None:
        self.transport.send(Message(self.me, to, self.tag, payload))

    def broadcast(self, payload: dict) -> None:
        for pid in range(1, self.n + 1):
            self.send(pid, payload)

    def send_once(self, marker: tuple, to: int, payload: dict) -> bool:
        """Idempotent send helper; returns False when already sent."""
        if marker in self._sent_once:
            return False
        self._sent_once.add(marker)
        self.send(to, payload)
        return True

    def broadcast_once(self, marker: tuple, payload: dict) -> bool:
        if marker in self._sent_once:
            return False
        self._sent_once.add(marker)
        self.broadcast(payload)
        return True
