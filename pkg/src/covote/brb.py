"""Bracha Byzantine reliable broadcast.

Echo quorum ceil((n+f+1)/2); ready amplification at f+1 and delivery at
2f+1. Tolerates f < n/3 with O(n^2) messages per instance.
"""

from __future__ import annotations

from typing import Callable

from .transport import ProtocolContext


def echo_quorum(n: int, f: int) -> int:
    return (n + f + 2) // 2  # ceil((n+f+1)/2)


class BrbInstance:
    def __init__(self, ctx: ProtocolContext, on_deliver: Callable[[bytes], None]):
        self.ctx = ctx
        self.on_deliver = on_deliver
        self.broadcast_called = False
        self.sent_echo = False
        self.sent_ready = False
        self.delivered = False
        self._echoes: dict[bytes, set[int]] = {}
        self._readies: dict[bytes, set[int]] = {}

    # counters for metrics / complexity checks
    @property
    def message_kinds(self):
        return ("SEND", "ECHO", "READY")

    def broadcast(self, value: bytes) -> None:
        if self.ctx.me != self.ctx.tag.origin:
            raise ValueError("only the instance originator may broadcast")
        if self.broadcast_called:
            raise ValueError("duplicate broadcast under one instance tag")
        self.broadcast_called = True
        self.ctx.broadcast({"type": "SEND", "value": value.hex()})

    def receive(self, sender: int, payload: dict) -> None:
        kind = payload.get("type")
        if kind == "SEND":
            if sender != self.ctx.tag.origin or self.sent_echo:
                return
            self.sent_echo = True
            self.ctx.broadcast({"type": "ECHO", "value": payload["value"]})
        elif kind == "ECHO":
            value = bytes.fromhex(payload["value"])
            self._echoes.setdefault(value, set()).add(sender)
            self._maybe_ready(value)
        elif kind == "READY":
            value = bytes.fromhex(payload["value"])
            self._readies.setdefault(value, set()).add(sender)
            self._maybe_ready(value)
            self._maybe_deliver(value)

    def _maybe_ready(self, value: bytes) -> None:
        if self.sent_ready:
            return
        n, f = self.ctx.n, self.ctx.f
        echoes = len(self._echoes.get(value, ()))
        readies = len(self._readies.get(value, ()))
        if echoes >= echo_quorum(n, f) or readies >= f + 1:
            self.sent_ready = True
            self.ctx.broadcast({"type": "READY", "value": value.hex()})

    def _maybe_deliver(self, value: bytes) -> None:
        if self.delivered:
            return
        if len(self._readies.get(value, ())) >= 2 * self.ctx.f + 1:
            self.delivered = True
            self.on_deliver(value)
