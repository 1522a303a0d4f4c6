"""Coordination daemon: issues elections, collects weighted partial tallies,
reconstructs the result, and runs audits.

The daemon never sees individual votes. Partial tallies are grouped by
(mode, combined commitment, accepted weight sum); any threshold-sized bucket
of verified shares interpolates to the same weighted sum of accepted votes,
so Byzantine voters cannot steer the outcome by emitting junk partials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .config import ElectionConfig
from .delegation import resolve_delegations
from .pedersen import VectorCommitment, verify_share_against_commitment
from .shamir import Share, interpolate
from .transport import DAEMON_ID, InstanceTag, Message, Transport


@dataclass(frozen=True)
class TallyDecision:
    election_id: str
    approved: bool
    tally: int
    weight_sum: int
    mode: str  # NORMAL | EARLY | LATE


@dataclass
class ElectionRecord:
    election_id: str
    issuer: str
    command: str
    config: ElectionConfig
    emergency: bool = False
    audit_of: Optional[str] = None
    effective_weights: dict[int, int] = field(default_factory=dict)
    delegation_map: dict[int, Optional[int]] = field(default_factory=dict)
    buckets: dict[tuple, dict[int, Share]] = field(default_factory=dict)
    bucket_payload: dict[tuple, dict] = field(default_factory=dict)
    decision: Optional[TallyDecision] = None
    voted: set[int] = field(default_factory=set)

    @property
    def decided(self) -> bool:
        return self.decision is not None


@dataclass
class AuditRecord:
    audit_id: str  # the audit election's id
    op_id: str  # the election being audited
    approved: Optional[bool] = None
    responses: dict[int, list] = field(default_factory=dict)
    revealed: dict[int, int] = field(default_factory=dict)  # origin -> vote

    @property
    def complete(self) -> bool:
        return self.approved is False or (
            self.approved is True and len(self.responses) > 0 and self._all_recovered
        )

    _all_recovered: bool = False


class DaemonCore:
    def __init__(
        self,
        transport: Transport,
        n: int,
        f: int,
        group,
        rng,
        executor: Optional[Callable[[str, TallyDecision], None]] = None,
        on_decision: Optional[Callable[[TallyDecision], None]] = None,
        on_log: Optional[Callable[[str, dict], None]] = None,
        pid: int = DAEMON_ID,
    ):
        self.transport = transport
        self.n = n
        self.f = f
        self.group = group
        self.rng = rng
        self.executor = executor
        self.on_decision = on_decision
        self.on_log = on_log
        self.pid = pid
        self.elections: dict[str, ElectionRecord] = {}
        self.audits: dict[str, AuditRecord] = {}  # keyed by audit election id
        self._audit_by_op: dict[str, str] = {}

    def _log(self, event: str, data: dict) -> None:
        if self.on_log is not None:
            self.on_log(event, data)

    def _fresh_id(self) -> str:
        return "%032x" % self.rng.getrandbits(128)

    # ---- issuing ----

    def issue(
        self,
        issuer: str,
        command: str,
        config: ElectionConfig,
        emergency: bool = False,
        audit_of: Optional[str] = None,
        inactive: Optional[set[int]] = None,
        election_id: Optional[str] = None,
    ) -> str:
        config.validate(self.group.q)
        if set(config.weights) - set(range(1, self.n + 1)):
            raise ValueError("weights reference unknown voter ids")
        eid = election_id if election_id is not None else self._fresh_id()
        if eid in self.elections:
            raise ValueError("election id already in use")
        weights, assignment = (
            resolve_delegations(config, inactive) if inactive else (dict(config.weights), {})
        )
        rec = ElectionRecord(
            election_id=eid,
            issuer=issuer,
            command=command,
            config=config,
            emergency=emergency,
            audit_of=audit_of,
            effective_weights=weights,
            delegation_map=assignment,
        )
        self.elections[eid] = rec
        if audit_of is not None:
            self.audits[eid] = AuditRecord(audit_id=eid, op_id=audit_of)
            self._audit_by_op[audit_of] = eid
        self._log(
            "REQUEST",
            {
                "election": eid,
                "issuer": issuer,
                "command": command,
                "emergency": emergency,
                "audit_of": audit_of,
                "config": config.to_dict(),
                "effective_weights": {str(k): v for k, v in weights.items()},
                "delegation": {str(k): v for k, v in assignment.items()},
            },
        )
        payload = {
            "type": "PROPOSE",
            "issuer": issuer,
            "command": command,
            "weights": {str(k): v for k, v in weights.items()},
            "threshold": str(config.threshold),
            "timeout": config.timeout,
            "emergency": emergency,
        }
        tag = InstanceTag(eid, "propose", 0)
        for pid in range(1, self.n + 1):
            self.transport.send(Message(self.pid, pid, tag, payload))
        return eid

    def start_audit(self, op_id: str, issuer: str = "auditor") -> str:
        """Issue the enabling election for an audit of `op_id`: uniform
        weights, simple majority. Disclosure follows only on approval."""
        if op_id not in self.elections:
            raise KeyError("unknown election")
        if op_id in self._audit_by_op:
            raise ValueError("audit already requested for this election")
        config = ElectionConfig(
            weights={i: 1 for i in range(1, self.n + 1)},
            threshold=Fraction(1, 2),
            timeout=self.elections[op_id].config.timeout,
        )
        return self.issue(issuer, f"audit {op_id}", config, audit_of=op_id)

    # ---- receiving ----

    def receive(self, msg: Message) -> None:
        kind = msg.tag.kind
        if kind == "tally":
            self._on_tally(msg)
        elif kind == "audit-share":
            self._on_audit_share(msg)

    def _on_tally(self, msg: Message) -> None:
        rec = self.elections.get(msg.tag.election)
        if rec is None or not 1 <= msg.sender <= self.n:
            return
        p = msg.payload
        try:
            mode = p["mode"]
            weight_sum = int(p["weight_sum"])
            partial = self.group.decode_scalar(bytes.fromhex(p["partial"]))
            blinding = self.group.decode_scalar(bytes.fromhex(p["blinding"]))
            commit_bytes = bytes.fromhex(p["commit"])
            vc = VectorCommitment.decode(self.group, commit_bytes)
        except (KeyError, ValueError):
            return
        if mode not in ("NORMAL", "EARLY", "LATE"):
            return
        if rec.decided:
            return
        if weight_sum < 0 or weight_sum > sum(rec.effective_weights.values()):
            return
        if weight_sum > 0 and not verify_share_against_commitment(
            self.group, msg.sender, partial, blinding, vc
        ):
            return
        key = (mode, commit_bytes, weight_sum)
        bucket = rec.buckets.setdefault(key, {})
        if msg.sender in bucket:
            return
        bucket[msg.sender] = Share(msg.sender, partial, blinding)
        # the share values themselves stay inside the tally boundary; only
        # the envelope is logged
        self._log(
            "PARTIAL_TALLY",
            {
                "election": rec.election_id,
                "sender": msg.sender,
                "mode": mode,
                "weight_sum": weight_sum,
            },
        )
        self.transport.send(
            Message(
                self.pid,
                msg.sender,
                InstanceTag(rec.election_id, "ack", msg.sender),
                {"type": "ACK", "mode": mode},
            )
        )
        if len(bucket) >= self.f + 1:
            self._try_decide(rec, mode, weight_sum, list(bucket.values()))

    def _try_decide(
        self, rec: ElectionRecord, mode: str, weight_sum: int, shares: list[Share]
    ) -> None:
        if rec.decided:
            return
        t = rec.config.threshold
        total = sum(rec.effective_weights.values())
        if weight_sum > 0:
            tally, _ = interpolate(self.group, shares, self.f + 1)
        else:
            tally = 0
        if mode == "EARLY":
            from .emergency import EarlyOutcome, emergency_evaluate

            try:
                outcome = emergency_evaluate(tally, weight_sum, total, t)
            except ValueError:
                return
            if outcome is EarlyOutcome.UNDECIDED:
                return  # wait for the late tally
            approved = outcome is EarlyOutcome.APPROVE_EARLY
        else:
            # an empty accepted set can never approve: 0 >= t*0 is vacuous
            approved = weight_sum > 0 and Fraction(tally) >= t * weight_sum
        rec.decision = TallyDecision(rec.election_id, approved, tally, weight_sum, mode)
        self._log(
            "DECISION",
            {
                "election": rec.election_id,
                "approved": approved,
                "tally": tally,
                "weight_sum": weight_sum,
                "mode": mode,
                "command": rec.command,
            },
        )
        if approved and self.executor is not None and rec.audit_of is None:
            self.executor(rec.command, rec.decision)
        if rec.audit_of is not None:
            self._on_audit_decided(rec)
        if self.on_decision is not None:
            self.on_decision(rec.decision)

    # ---- audits ----

    def _on_audit_decided(self, rec: ElectionRecord) -> None:
        audit = self.audits[rec.election_id]
        audit.approved = rec.decision.approved
        if not rec.decision.approved:
            self._log("AUDIT_REFUSED", {"audit": rec.election_id, "of": audit.op_id})
            return
        tag = InstanceTag(audit.op_id, "audit-req", 0)
        payload = {"type": "AUDIT_REQ", "op_id": audit.op_id}
        for pid in range(1, self.n + 1):
            self.transport.send(Message(self.pid, pid, tag, payload))

    def _on_audit_share(self, msg: Message) -> None:
        op_id = msg.payload.get("op_id", msg.tag.election)
        audit_id = self._audit_by_op.get(op_id)
        if audit_id is None or not 1 <= msg.sender <= self.n:
            return
        audit = self.audits[audit_id]
        if not audit.approved or msg.sender in audit.responses:
            return
        entries = msg.payload.get("entries", [])
        audit.responses[msg.sender] = entries
        self._recover_votes(audit)

    def _recover_votes(self, audit: AuditRecord) -> None:
        """Group disclosed shares per origin by identical commitment and
        interpolate each group with at least f+1 consistent points."""
        groups: dict[int, dict[bytes, dict[int, Share]]] = {}
        for voter, entries in audit.responses.items():
            for entry in entries:
                try:
                    origin = int(entry[0])
                    share = Share.decode(self.group, bytes.fromhex(entry[1]))
                    vc_bytes = bytes.fromhex(entry[2])
                    vc = VectorCommitment.decode(self.group, vc_bytes)
                except (ValueError, IndexError, TypeError):
                    continue
                if share.index != voter:
                    continue
                if not verify_share_against_commitment(
                    self.group, share.index, share.vote_share, share.blinding_share, vc
                ):
                    continue
                groups.setdefault(origin, {}).setdefault(vc_bytes, {})[voter] = share
        recovered = True
        for origin in range(1, self.n + 1):
            if origin in audit.revealed:
                continue
            done = False
            for shares in groups.get(origin, {}).values():
                if len(shares) >= self.f + 1:
                    vote, _ = interpolate(self.group, list(shares.values()), self.f + 1)
                    audit.revealed[origin] = vote
                    self._log(
                        "AUDIT_REVEAL",
                        {"of": audit.op_id, "origin": origin, "vote": vote},
                    )
                    done = True
                    break
            if not done:
                recovered = False
        if recovered:
            audit._all_recovered = True
            self._log(
                "AUDIT_COMPLETE",
                {
                    "of": audit.op_id,
                    "votes": {str(k): v for k, v in sorted(audit.revealed.items())},
                },
            )
