"""Randomized asynchronous binary agreement (signature-free, common-coin
driven), in the style of Mostefaoui-Moumen-Raynal.

Each round: binary-value broadcast of estimates (relay at f+1, accept at
2f+1), then AUX exchange; with n-f AUX values inside the accepted set the
round closes on the coin. A Bracha-style DECIDE gadget lets processes halt:
decide on coin agreement or on f+1 DECIDEs, stop participating entirely on
2f+1 DECIDEs.
"""

from __future__ import annotations

from typing import Callable, Optional

from .coin import CommonCoin
from .transport import ProtocolContext


class AbaInstance:
    def __init__(
        self,
        ctx: ProtocolContext,
        coin: CommonCoin,
        on_decide: Callable[[int], None],
    ):
        self.ctx = ctx
        self.coin = coin
        self.on_decide = on_decide
        self.proposed = False
        self.decided: Optional[int] = None
        self.halted = False
        self.round = 0
        self.est: Optional[int] = None
        self._est_recv: dict[tuple[int, int], set[int]] = {}  # (round, v) -> senders
        self._bin_values: dict[int, set[int]] = {}
        self._aux_recv: dict[int, dict[int, int]] = {}  # round -> sender -> v
        self._decide_recv: dict[int, set[int]] = {0: set(), 1: set()}
        self._sent_decide = False

    def propose(self, value: int) -> None:
        if value not in (0, 1):
            raise ValueError("binary agreement takes bits")
        if self.proposed:
            raise ValueError("duplicate proposal in one instance")
        self.proposed = True
        self._start_round(1, value)

    def _start_round(self, round_no: int, est: int) -> None:
        self.round = round_no
        self.est = est
        self._broadcast_est(round_no, est)
        self._check_round()

    def _broadcast_est(self, round_no: int, v: int) -> None:
        self.ctx.broadcast_once(
            ("EST", round_no, v), {"type": "EST", "round": round_no, "v": v}
        )

    def receive(self, sender: int, payload: dict) -> None:
        if self.halted:
            return
        kind = payload.get("type")
        if kind == "EST":
            r, v = payload["round"], payload["v"]
            if v not in (0, 1):
                return
            senders = self._est_recv.setdefault((r, v), set())
            senders.add(sender)
            if len(senders) >= self.ctx.f + 1:
                self._broadcast_est(r, v)  # relay once
            if len(senders) >= 2 * self.ctx.f + 1:
                self._bin_values.setdefault(r, set()).add(v)
            self._check_round()
        elif kind == "AUX":
            r, v = payload["round"], payload["v"]
            if v not in (0, 1):
                return
            self._aux_recv.setdefault(r, {}).setdefault(sender, v)
            self._check_round()
        elif kind == "DECIDE":
            v = payload["v"]
            if v not in (0, 1):
                return
            self._decide_recv[v].add(sender)
            if len(self._decide_recv[v]) >= self.ctx.f + 1:
                self._send_decide(v)
                self._decide(v)
            if len(self._decide_recv[v]) >= 2 * self.ctx.f + 1:
                self.halted = True

    def _check_round(self) -> None:
        r = self.round
        if r == 0 or self.halted:
            return
        binv = self._bin_values.get(r, set())
        if binv:
            self.ctx.broadcast_once(
                ("AUX", r), {"type": "AUX", "round": r, "v": min(binv)}
            )
        valid = {
            s: v for s, v in self._aux_recv.get(r, {}).items() if v in binv
        }
        if len(valid) < self.ctx.n - self.ctx.f:
            return
        vals = set(valid.values())
        s = self.coin.flip(self.ctx.tag, r)
        if len(vals) == 1:
            (b,) = vals
            if b == s:
                self._send_decide(b)
                self._decide(b)
                if self.halted:
                    return
            nxt = b
        else:
            nxt = s
        self._start_round(r + 1, nxt)

    def _send_decide(self, v: int) -> None:
        if not self._sent_decide:
            self._sent_decide = True
            self.ctx.broadcast({"type": "DECIDE", "v": v})

    def _decide(self, v: int) -> None:
        if self.decided is None:
            self.decided = v
            self.on_decide(v)
