"""Deterministic discrete-event network simulator with fault injection.

All protocol code runs unmodified over SimTransport. Model time advances by
the latency model; before the global stabilization time the scheduler adds
seeded random reordering delay, afterwards delivery respects the latency
bound. The same (spec, seed) always produces the identical event trace.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .transport import Message

LATENCY_PRESETS = {"low": 0.005, "medium": 0.040, "high": 0.150}


# ---- adversary behaviors ----


@dataclass(frozen=True)
class Behavior:
    kind: str  # CRASH_AT | SILENT | EQUIVOCATE | INVALID_VOTE | INVALID_SHARES | DELAY_ALL
    step: int = 0  # CRASH_AT: outgoing message count before the crash
    vote: int = 2  # INVALID_VOTE: the out-of-range value to share
    delay: float = 1.0  # DELAY_ALL: extra delay on every outgoing message


def crash_at(step: int) -> Behavior:
    return Behavior("CRASH_AT", step=step)


SILENT = Behavior("SILENT")
EQUIVOCATE = Behavior("EQUIVOCATE")
INVALID_SHARES = Behavior("INVALID_SHARES")


def invalid_vote(v: int = 2) -> Behavior:
    return Behavior("INVALID_VOTE", vote=v)


def delay_all(delay: float = 1.0) -> Behavior:
    return Behavior("DELAY_ALL", delay=delay)


# ---- simulator ----


class SimClock:
    def __init__(self, sim: "Simulator"):
        self._sim = sim

    def now(self) -> float:
        return self._sim.time

    def call_later(self, delay: float, fn: Callable[[], None]) -> None:
        self._sim.schedule(delay, fn)


class Simulator:
    def __init__(
        self,
        seed: int = 0,
        latency: float = 0.005,
        gst_time: float = 0.0,
        pre_gst_spread: float = 0.5,
        process_cost: float = 0.0,
    ):
        self.rng = random.Random(seed)
        self.latency = latency
        self.gst_time = gst_time
        self.pre_gst_spread = pre_gst_spread
        self.process_cost = process_cost
        self._busy_until: dict[int, float] = {}
        self.time = 0.0
        self._queue: list = []
        self._seq = 0
        self.nodes: dict[int, object] = {}
        self.adversary: dict[int, Behavior] = {}
        self._sent_counts: dict[int, int] = {}
        self.message_counts: dict[str, int] = {}
        self.total_messages = 0
        self.trace: list[tuple] = []
        self.record_trace = False

    # -- scheduling --

    def schedule(self, delay: float, fn: Callable[[], None]) -> None:
        heapq.heappush(self._queue, (self.time + delay, self._seq, fn))
        self._seq += 1

    def run(self, until: Optional[float] = None, max_events: int = 2_000_000) -> None:
        events = 0
        while self._queue:
            t, _, fn = self._queue[0]
            if until is not None and t > until:
                return
            heapq.heappop(self._queue)
            self.time = max(self.time, t)
            fn()
            events += 1
            if events >= max_events:
                raise RuntimeError("event budget exceeded (possible livelock)")

    @property
    def idle(self) -> bool:
        return not self._queue

    # -- transport --

    def add_node(self, pid: int, node) -> None:
        self.nodes[pid] = node

    def crashed(self, pid: int) -> bool:
        b = self.adversary.get(pid)
        return (
            b is not None
            and b.kind == "CRASH_AT"
            and self._sent_counts.get(pid, 0) >= b.step
        )

    def send(self, msg: Message) -> None:
        sender = msg.sender
        behavior = self.adversary.get(sender)
        extra = 0.0
        if behavior is not None:
            if behavior.kind == "SILENT":
                return
            if behavior.kind == "CRASH_AT":
                if self._sent_counts.get(sender, 0) >= behavior.step:
                    return
            if behavior.kind == "DELAY_ALL":
                extra = behavior.delay
        self._sent_counts[sender] = self._sent_counts.get(sender, 0) + 1
        self.message_counts[msg.tag.kind] = self.message_counts.get(msg.tag.kind, 0) + 1
        self.total_messages += 1
        delay = self.latency if msg.sender != msg.recipient else 0.0
        if self.time < self.gst_time:
            delay += self.rng.uniform(0.0, self.pre_gst_spread)
        delay += extra
        if self.record_trace:
            self.trace.append(
                (round(self.time, 9), msg.sender, msg.recipient, msg.tag.key(), _payload_fp(msg.payload))
            )
        if self.process_cost:
            # each message occupies the recipient for process_cost seconds;
            # handling is serialized per process, so arrivals queue behind
            # whatever the recipient is still working on
            arrival = self.time + delay
            start = max(arrival, self._busy_until.get(msg.recipient, 0.0))
            done = start + self.process_cost
            self._busy_until[msg.recipient] = done
            delay = done - self.time
        self.schedule(delay, lambda m=msg: self._deliver(m))

    def _deliver(self, msg: Message) -> None:
        node = self.nodes.get(msg.recipient)
        if node is None or self.crashed(msg.recipient):
            return
        node.receive(msg)


def _payload_fp(payload: dict) -> str:
    import hashlib
    import json

    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()[:12]


class SimTransport:
    """Transport facade bound to one simulator."""

    def __init__(self, sim: Simulator):
        self.sim = sim

    def send(self, msg: Message) -> None:
        self.sim.send(msg)
