"""Asynchronous verifiable secret sharing.

Construction: the dealer Shamir-shares the (vote, blinding) pair with
threshold f+1, reliably broadcasts the polynomial vector commitment, and
privately sends each party its share. To make every share recoverable, the
dealer also deals a second-layer sharing of each party's share point; the
sub-share commitments ride along in the same reliable broadcast, bound to
the main commitment by the homomorphic index evaluation.

Parties acknowledge (broadcast ACK) only after validating their own share
and all second-layer material. On 2f+1 ACKs the instance completes; a party
whose own share is missing or invalid recovers it from f+1 second-layer
points echoed by acknowledged parties.
"""

from __future__ import annotations

from typing import Callable, Optional

from .brb import BrbInstance
from .groups import Group
from .pedersen import (
    VectorCommitment,
    commit,
    commitment_at_index,
    verify_share_against_commitment,
)
from .shamir import Share, interpolate, shamir_share
from .transport import ProtocolContext


def encode_dealing(group: Group, vc: VectorCommitment, subvcs: list[VectorCommitment]) -> bytes:
    parts = [vc.encode(group)] + [s.encode(group) for s in subvcs]
    out = b""
    for p in parts:
        out += len(p).to_bytes(4, "big") + p
    return out


def decode_dealing(group: Group, data: bytes) -> tuple[VectorCommitment, list[VectorCommitment]]:
    parts = []
    off = 0
    while off < len(data):
        ln = int.from_bytes(data[off : off + 4], "big")
        off += 4
        parts.append(VectorCommitment.decode(group, data[off : off + ln]))
        off += ln
    if not parts:
        raise ValueError("empty dealing")
    return parts[0], parts[1:]


class AvssInstance:
    """One sharing instance; ctx.tag.origin is the dealer."""

    def __init__(
        self,
        ctx: ProtocolContext,
        brb_ctx: ProtocolContext,
        group: Group,
        rng,
        on_complete: Callable[[Share, VectorCommitment], None],
    ):
        self.ctx = ctx
        self.group = group
        self.rng = rng
        self.on_complete = on_complete
        self.brb = BrbInstance(brb_ctx, self._on_commitments)

        self.vc: Optional[VectorCommitment] = None
        self.subvcs: list[VectorCommitment] = []
        self.my_share: Optional[Share] = None
        self.my_subshares: Optional[dict[int, Share]] = None  # index -> sub-share at me
        self.validated = False
        self.complete = False
        self._acks: set[int] = set()
        self._shared = False
        self._recover_requested = False
        self._pending_requests: set[int] = set()
        self._recover_points: dict[int, Share] = {}

    @property
    def k(self) -> int:
        return self.ctx.f + 1

    # ---- dealer side ----

    def share(self, vote: int, blinding: int) -> None:
        if self.ctx.me != self.ctx.tag.origin:
            raise ValueError("only the dealer may share")
        if self._shared:
            raise ValueError("dealer shares once per instance")
        self._shared = True
        n = self.ctx.n
        shares, vc = shamir_share(self.group, vote, blinding, self.k, n, self.rng)
        sub = [
            shamir_share(
                self.group, s.vote_share, s.blinding_share, self.k, n, self.rng
            )
            for s in shares
        ]
        self.brb.broadcast(
            encode_dealing(self.group, vc, [svc for _, svc in sub])
        )
        for j in range(1, n + 1):
            self.ctx.send(
                j,
                {
                    "type": "SHARE",
                    "share": shares[j - 1].encode(self.group).hex(),
                    "subshares": {
                        str(i): sub[i - 1][0][j - 1].encode(self.group).hex()
                        for i in range(1, n + 1)
                    },
                },
            )

    # ---- receiver side ----

    def _on_commitments(self, data: bytes) -> None:
        try:
            vc, subvcs = decode_dealing(self.group, data)
        except ValueError:
            return
        if len(subvcs) != self.ctx.n or len(vc) != self.k:
            return
        if any(len(s) != self.k for s in subvcs):
            return
        # second-layer sharings must open to the main polynomial's points
        for i in range(1, self.ctx.n + 1):
            if subvcs[i - 1].coeff_commits[0] != commitment_at_index(
                self.group, vc, i
            ):
                return
        self.vc = vc
        self.subvcs = subvcs
        self._try_validate()
        self._try_complete()

    def receive(self, sender: int, payload: dict) -> None:
        kind = payload.get("type")
        if kind == "SHARE":
            if sender != self.ctx.tag.origin or self.my_share is not None:
                return
            try:
                share = Share.decode(self.group, bytes.fromhex(payload["share"]))
                subshares = {
                    int(i): Share.decode(self.group, bytes.fromhex(v))
                    for i, v in payload["subshares"].items()
                }
            except (ValueError, KeyError, AttributeError):
                return
            self.my_share = share
            self.my_subshares = subshares
            self._try_validate()
            self._try_complete()
        elif kind == "ACK":
            self._acks.add(sender)
            self._try_complete()
        elif kind == "RECOVER_REQ":
            self._pending_requests.add(sender)
            self._serve_requests()
        elif kind == "RECOVER":
            self._on_recover_point(sender, payload)

    def _try_validate(self) -> None:
        if self.validated or self.vc is None or self.my_share is None:
            return
        me = self.ctx.me
        s = self.my_share
        if s.index != me:
            return
        if not verify_share_against_commitment(
            self.group, me, s.vote_share, s.blinding_share, self.vc
        ):
            return  # invalid share: no acknowledgment, wait for recovery
        subs = self.my_subshares or {}
        if set(subs) != set(range(1, self.ctx.n + 1)):
            return
        for i, sub in subs.items():
            if sub.index != me or not verify_share_against_commitment(
                self.group, me, sub.vote_share, sub.blinding_share, self.subvcs[i - 1]
            ):
                return
        self.validated = True
        self.ctx.broadcast({"type": "ACK"})
        self._serve_requests()

    def _serve_requests(self) -> None:
        # only parties holding the full validated second layer can serve
        if not self.validated or not self.my_subshares:
            return
        for requester in sorted(self._pending_requests):
            sub = self.my_subshares.get(requester)
            if sub is None:
                continue
            self.ctx.send_once(
                ("RECOVER", requester),
                requester,
                {
                    "type": "RECOVER",
                    "subshare": sub.encode(self.group).hex(),
                },
            )
        self._pending_requests.clear()

    def _on_recover_point(self, sender: int, payload: dict) -> None:
        if self.validated or self.complete or self.vc is None:
            return
        try:
            sub = Share.decode(self.group, bytes.fromhex(payload["subshare"]))
        except (ValueError, KeyError):
            return
        if sub.index != sender:
            return
        if not verify_share_against_commitment(
            self.group,
            sub.index,
            sub.vote_share,
            sub.blinding_share,
            self.subvcs[self.ctx.me - 1],
        ):
            return
        self._recover_points[sub.index] = sub
        if len(self._recover_points) >= self.k:
            vote, blinding = interpolate(
                self.group, list(self._recover_points.values()), self.k
            )
            candidate = Share(self.ctx.me, vote, blinding)
            if verify_share_against_commitment(
                self.group, self.ctx.me, vote, blinding, self.vc
            ):
                self.my_share = candidate
                self.validated = True
                self._try_complete()

    def _try_complete(self) -> None:
        if self.complete or self.vc is None:
            return
        if len(self._acks) < 2 * self.ctx.f + 1:
            return
        if not self.validated:
            if not self._recover_requested:
                self._recover_requested = True
                self.ctx.broadcast({"type": "RECOVER_REQ"})
            return
        self.complete = True
        self.on_complete(self.my_share, self.vc)
