"""Voter-side election state machine.

Per election the voter casts a hidden ballot (secret-shared vote plus a
reliably broadcast binary proof), proposes in one binary-agreement instance
per voter to fix the accepted vote set, and emits a weighted partial tally
to the daemon once every instance has decided. Emergency elections run a
second, early-closing set of agreement instances whose positive decisions
subsume the late ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Protocol

from .aba import AbaInstance
from .avss import AvssInstance
from .binary_proof import BinaryProof, isbinary_prove, isbinary_verify
from .brb import BrbInstance
from .coin import CommonCoin
from .emergency import emergency_threshold
from .pedersen import VectorCommitment, commit, commit_weighted_combine
from .shamir import Share, share_linear_combine
from .transport import (
    DAEMON_ID,
    Clock,
    InstanceTag,
    Message,
    ProtocolContext,
    Transport,
)


@dataclass
class ProtocolParams:
    group: object
    coin: CommonCoin
    challenge_bits: int
    n: int
    f: int

    @property
    def k(self) -> int:
        return self.f + 1


class VoteSource(Protocol):
    """How a voter obtains its manual vote: interactive UI, scripted policy,
    or nothing (the timeout/delegation path covers absentees)."""

    def request(
        self, voter: int, election_id: str, command: str, weights: dict[int, int],
        cast: Callable[[int], None],
    ) -> None: ...


class PolicySource:
    """Scripted policy: a fixed bit or a callable deciding per command."""

    def __init__(self, policy, delay: float = 0.0, clock: Optional[Clock] = None):
        self.policy = policy
        self.delay = delay
        self.clock = clock

    def _decide(self, voter, election_id, command):
        return self.policy(voter, election_id, command) if callable(self.policy) else self.policy

    def request(self, voter, election_id, command, weights, cast):
        vote = self._decide(voter, election_id, command)
        if vote is None:
            return  # abstain entirely
        if self.delay and self.clock is not None:
            self.clock.call_later(self.delay, lambda: cast(vote))
        else:
            cast(vote)


class InteractiveSource:
    """Holds the request until an external caller (HTTP API) supplies the
    vote; at most one cast per election."""

    def __init__(self):
        self.pending: dict[str, tuple[str, dict, Callable[[int], None]]] = {}
        self.cast_votes: dict[str, int] = {}

    def request(self, voter, election_id, command, weights, cast):
        self.pending[election_id] = (command, weights, cast)

    def cast(self, election_id: str, vote: int) -> None:
        if election_id in self.cast_votes:
            raise KeyError("vote already cast for this election")
        if election_id not in self.pending:
            raise LookupError("no pending vote request for this election")
        _, _, fn = self.pending.pop(election_id)
        self.cast_votes[election_id] = vote
        fn(vote)


class ShareLog:
    """Per-voter record of received shares, disclosed only through audits."""

    def __init__(self):
        self._entries: dict[str, list[tuple[int, bytes, bytes]]] = {}

    def append(self, election_id: str, origin: int, share: bytes, vc: bytes) -> None:
        self._entries.setdefault(election_id, []).append((origin, share, vc))

    def entries(self, election_id: str) -> list[tuple[int, bytes, bytes]]:
        return list(self._entries.get(election_id, ()))


@dataclass
class ElectionState:
    election_id: str
    issuer: Optional[str] = None
    command: Optional[str] = None
    weights: Optional[dict[int, int]] = None
    threshold: Optional[Fraction] = None
    timeout: Optional[float] = None
    emergency: bool = False
    started_at: Optional[float] = None
    accepting: bool = True
    timer_fired: bool = False
    vote_cast: Optional[int] = None
    vote_shares: dict[int, Share] = field(default_factory=dict)
    vec_commits: dict[int, VectorCommitment] = field(default_factory=dict)
    proofs: dict[int, bytes] = field(default_factory=dict)
    proof_valid: dict[int, bool] = field(default_factory=dict)
    joined: set[int] = field(default_factory=set)
    decs: dict[int, int] = field(default_factory=dict)
    proposed: set[int] = field(default_factory=set)
    emitted: bool = False
    # emergency bookkeeping
    early_decs: dict[int, int] = field(default_factory=dict)
    early_proposed: set[int] = field(default_factory=set)
    early_closed: bool = False
    early_emitted: bool = False
    avss: dict[int, AvssInstance] = field(default_factory=dict)
    proof_brb: dict[int, BrbInstance] = field(default_factory=dict)
    abas: dict[int, AbaInstance] = field(default_factory=dict)
    early_abas: dict[int, AbaInstance] = field(default_factory=dict)

    def final_dec(self, origin: int) -> Optional[int]:
        if self.emergency and self.early_decs.get(origin) == 1:
            return 1
        return self.decs.get(origin)


class VoterNode:
    def __init__(
        self,
        pid: int,
        params: ProtocolParams,
        transport: Transport,
        clock: Clock,
        rng,
        vote_source: VoteSource,
        share_log: Optional[ShareLog] = None,
        daemon_id: int = DAEMON_ID,
    ):
        self.pid = pid
        self.params = params
        self.transport = transport
        self.clock = clock
        self.rng = rng
        self.vote_source = vote_source
        self.share_log = share_log if share_log is not None else ShareLog()
        self.daemon_id = daemon_id
        self.elections: dict[str, ElectionState] = {}
        self.cast_votes: dict[str, int] = {}  # ground truth, for harness checks

    # ---- wiring ----

    def _ctx(self, election_id: str, kind: str, origin: int) -> ProtocolContext:
        return ProtocolContext(
            self.transport,
            InstanceTag(election_id, kind, origin),
            self.pid,
            self.params.n,
            self.params.f,
        )

    def _state(self, election_id: str) -> ElectionState:
        if election_id not in self.elections:
            self.elections[election_id] = ElectionState(election_id)
        return self.elections[election_id]

    def _avss(self, st: ElectionState, origin: int) -> AvssInstance:
        if origin not in st.avss:
            st.avss[origin] = AvssInstance(
                self._ctx(st.election_id, "avss", origin),
                self._ctx(st.election_id, "avss-com", origin),
                self.params.group,
                self.rng,
                lambda share, vc, o=origin: self._on_avss_complete(st, o, share, vc),
            )
        return st.avss[origin]

    def _proof_brb(self, st: ElectionState, origin: int) -> BrbInstance:
        if origin not in st.proof_brb:
            st.proof_brb[origin] = BrbInstance(
                self._ctx(st.election_id, "brb-proof", origin),
                lambda data, o=origin: self._on_proof(st, o, data),
            )
        return st.proof_brb[origin]

    def _aba(self, st: ElectionState, origin: int) -> AbaInstance:
        if origin not in st.abas:
            st.abas[origin] = AbaInstance(
                self._ctx(st.election_id, "aba", origin),
                self.params.coin,
                lambda b, o=origin: self._on_decide(st, o, b),
            )
        return st.abas[origin]

    def _early_aba(self, st: ElectionState, origin: int) -> AbaInstance:
        if origin not in st.early_abas:
            st.early_abas[origin] = AbaInstance(
                self._ctx(st.election_id, "aba-early", origin),
                self.params.coin,
                lambda b, o=origin: self._on_early_decide(st, o, b),
            )
        return st.early_abas[origin]

    def receive(self, msg: Message) -> None:
        kind = msg.tag.kind
        st = self._state(msg.tag.election)
        if kind == "propose":
            if msg.sender != self.daemon_id:
                return
            self._on_propose(st, msg.payload)
        elif kind == "avss":
            self._avss(st, msg.tag.origin).receive(msg.sender, msg.payload)
        elif kind == "avss-com":
            self._avss(st, msg.tag.origin).brb.receive(msg.sender, msg.payload)
        elif kind == "brb-proof":
            self._proof_brb(st, msg.tag.origin).receive(msg.sender, msg.payload)
        elif kind == "aba":
            self._aba(st, msg.tag.origin).receive(msg.sender, msg.payload)
        elif kind == "aba-early":
            if st.emergency or st.weights is None:
                self._early_aba(st, msg.tag.origin).receive(msg.sender, msg.payload)
        elif kind == "audit-req":
            if msg.sender == self.daemon_id:
                self._on_audit_request(msg.payload)
        elif kind == "ack":
            pass  # acknowledged receipt; no protocol dependence

    # ---- protocol steps ----

    def _on_propose(self, st: ElectionState, payload: dict) -> None:
        if st.weights is not None:
            return  # duplicate propose
        st.issuer = payload.get("issuer")
        st.command = payload.get("command", "")
        st.weights = {int(k): int(v) for k, v in payload["weights"].items()}
        st.threshold = Fraction(str(payload["threshold"]))
        st.timeout = float(payload.get("timeout", 300.0))
        st.emergency = bool(payload.get("emergency", False))
        st.started_at = self.clock.now()
        self.clock.call_later(st.timeout, lambda: self._on_timer(st))
        self.vote_source.request(
            self.pid,
            st.election_id,
            st.command,
            st.weights,
            lambda vote: self._cast_ballot(st, vote),
        )
        # propose may arrive after shares; re-evaluate everything gated on it
        self._maybe_close_early(st)
        self._maybe_emit_early(st)
        self._maybe_emit(st)

    def _cast_ballot(self, st: ElectionState, vote: int) -> None:
        if vote not in (0, 1):
            raise ValueError("votes are binary")
        if st.vote_cast is not None:
            return
        st.vote_cast = vote
        self.cast_votes[st.election_id] = vote
        group = self.params.group
        blinding = group.random_scalar(self.rng)
        c = commit(group, vote, blinding)
        proof = isbinary_prove(
            group, vote, blinding, c, self.rng, self.params.challenge_bits
        )
        self._avss(st, self.pid).share(vote, blinding)
        self._proof_brb(st, self.pid).broadcast(proof.encode(group))

    def _on_avss_complete(
        self, st: ElectionState, origin: int, share: Share, vc: VectorCommitment
    ) -> None:
        group = self.params.group
        self.share_log.append(
            st.election_id, origin, share.encode(group), vc.encode(group)
        )
        st.vote_shares[origin] = share
        st.vec_commits[origin] = vc
        self._maybe_join(st, origin)
        self._maybe_emit_early(st)
        self._maybe_emit(st)

    def _on_proof(self, st: ElectionState, origin: int, data: bytes) -> None:
        st.proofs[origin] = data
        self._maybe_join(st, origin)

    def _maybe_join(self, st: ElectionState, origin: int) -> None:
        if origin in st.joined:
            return
        if origin not in st.vec_commits or origin not in st.proofs:
            return
        st.joined.add(origin)
        group = self.params.group
        try:
            proof = BinaryProof.decode(
                group, st.proofs[origin], self.params.challenge_bits
            )
            valid = isbinary_verify(
                group,
                st.vec_commits[origin].coeff_commits[0],
                proof,
                self.params.challenge_bits,
            )
        except ValueError:
            valid = False
        st.proof_valid[origin] = valid
        if st.accepting and valid:
            self._propose(st, origin, 1)
            if st.emergency and not st.early_closed:
                self._propose_early(st, origin, 1)

    def _propose(self, st: ElectionState, origin: int, value: int) -> None:
        if origin in st.proposed:
            return
        st.proposed.add(origin)
        self._aba(st, origin).propose(value)

    def _propose_early(self, st: ElectionState, origin: int, value: int) -> None:
        if origin in st.early_proposed:
            return
        st.early_proposed.add(origin)
        self._early_aba(st, origin).propose(value)

    def _on_timer(self, st: ElectionState) -> None:
        st.timer_fired = True
        self._maybe_close(st)

    def _on_decide(self, st: ElectionState, origin: int, bit: int) -> None:
        st.decs[origin] = bit
        self._maybe_close(st)
        self._maybe_emit(st)

    def _on_early_decide(self, st: ElectionState, origin: int, bit: int) -> None:
        st.early_decs[origin] = bit
        self._maybe_close_early(st)
        self._maybe_emit_early(st)
        # a positive early decision subsumes the late instance
        self._maybe_close(st)
        self._maybe_emit(st)

    def _final_true_count(self, st: ElectionState) -> int:
        n = self.params.n
        return sum(1 for i in range(1, n + 1) if st.final_dec(i) == 1)

    def _maybe_close(self, st: ElectionState) -> None:
        if not st.accepting or not st.timer_fired:
            return
        if self._final_true_count(st) < self.params.n - self.params.f:
            return
        st.accepting = False
        for i in range(1, self.params.n + 1):
            self._propose(st, i, 0)

    def _maybe_close_early(self, st: ElectionState) -> None:
        if not st.emergency or st.early_closed or st.weights is None:
            return
        total = sum(st.weights.values())
        true_weight = sum(
            st.weights.get(i, 0) for i, b in st.early_decs.items() if b == 1
        )
        if Fraction(true_weight) < emergency_threshold(st.threshold) * total:
            return
        st.early_closed = True
        for i in range(1, self.params.n + 1):
            self._propose_early(st, i, 0)

    def _emit(self, st: ElectionState, accepted: list[int], mode: str) -> None:
        group = self.params.group
        weights = st.weights
        weight_sum = sum(weights.get(i, 0) for i in accepted)
        terms = [
            (st.vote_shares[i], weights.get(i, 0)) for i in accepted
        ]
        if terms:
            partial = share_linear_combine(group, [(s, w) for s, w in terms])
            vc = commit_weighted_combine(
                group, [(st.vec_commits[i], weights.get(i, 0)) for i in accepted]
            )
        else:
            partial = Share(self.pid, 0, 0)
            vc = VectorCommitment(tuple(group.identity for _ in range(self.params.k)))
        self.transport.send(
            Message(
                self.pid,
                self.daemon_id,
                InstanceTag(st.election_id, "tally", self.pid),
                {
                    "type": "TALLY",
                    "mode": mode,
                    "partial": group.encode_scalar(partial.vote_share).hex(),
                    "blinding": group.encode_scalar(partial.blinding_share).hex(),
                    "commit": vc.encode(group).hex(),
                    "weight_sum": weight_sum,
                },
            )
        )

    def _maybe_emit(self, st: ElectionState) -> None:
        if st.emitted or st.weights is None:
            return
        n = self.params.n
        finals = {i: st.final_dec(i) for i in range(1, n + 1)}
        if any(v is None for v in finals.values()):
            return
        accepted = [i for i, v in finals.items() if v == 1]
        if any(i not in st.vote_shares for i in accepted):
            return  # liveness relies on sharing totality
        st.emitted = True
        self._emit(st, accepted, "LATE" if st.emergency else "NORMAL")

    def _maybe_emit_early(self, st: ElectionState) -> None:
        if not st.emergency or st.early_emitted or st.weights is None:
            return
        n = self.params.n
        if any(i not in st.early_decs for i in range(1, n + 1)):
            return
        accepted = [i for i in range(1, n + 1) if st.early_decs[i] == 1]
        if any(i not in st.vote_shares for i in accepted):
            return
        st.early_emitted = True
        self._emit(st, accepted, "EARLY")

    # ---- audits ----

    def _on_audit_request(self, payload: dict) -> None:
        op_id = payload["op_id"]
        entries = [
            [origin, share.hex(), vc.hex()]
            for origin, share, vc in self.share_log.entries(op_id)
        ]
        self.transport.send(
            Message(
                self.pid,
                self.daemon_id,
                InstanceTag(op_id, "audit-share", self.pid),
                {"type": "AUDIT_SHARE", "op_id": op_id, "entries": entries},
            )
        )
