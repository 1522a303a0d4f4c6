"""Long-running coordination service: config store, executor shim, the
in-process voter fleet, and the HTTP API used by the CLI and the web UI.

All protocol handling runs through one LocalNet serialization domain, so
HTTP worker threads and timers never race the per-process handlers. The
tally reconstruction state lives only inside the daemon core; endpoints
expose decisions, never shares.
"""

from __future__ import annotations

import json
import os
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .binary_proof import TEST_CHALLENGE_BITS
from .coin import SharedSeedCoin
from .config import ElectionConfig, TrustEdge
from .daemon_core import DaemonCore, TallyDecision
from .groups import TEST_GROUP
from .localnet import LocalNet
from .logstore import CommandLog
from .voter import InteractiveSource, ProtocolParams, ShareLog, VoterNode

DATA_DIR_ENV = "COVOTE_DATA_DIR"
LISTEN_ENV = "COVOTE_LISTEN"

CONFIG_COMMAND_PREFIX = "config:set "


def default_config(n: int) -> ElectionConfig:
    return ElectionConfig(
        weights={i: 1 for i in range(1, n + 1)},
        threshold=Fraction(1, 2),
        max_weight=Fraction(1),
        timeout=30.0,
    )


class ConfigStore:
    """File-backed per-issuer election configs plus voter-managed
    delegation edges. Issuer configs change only through approved
    elections carrying a config command."""

    def __init__(self, path: str, n: int, initial: Optional[dict] = None):
        self.path = path
        self.n = n
        self._lock = threading.Lock()
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                self._data = json.load(fh)
        else:
            issuers = {"default": default_config(n).to_dict()}
            for issuer, cfg in (initial or {}).items():
                issuers[issuer] = cfg.to_dict()
            self._data = {"issuers": issuers, "delegations": {}}
            self._save()

    def _save(self) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(self.path)), exist_ok=True)
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(self._data, fh, indent=2, sort_keys=True)
        os.replace(tmp, self.path)

    def load(self, issuer: str) -> ElectionConfig:
        with self._lock:
            raw = self._data["issuers"].get(issuer)
            if raw is None:
                raise KeyError(f"no config for issuer {issuer!r}")
            cfg = ElectionConfig.from_dict(raw)
            edges = list(cfg.delegation)
            for src, pairs in self._data.get("delegations", {}).items():
                for dst, trust in pairs:
                    edges.append(TrustEdge(int(src), int(dst), int(trust)))
            cfg.delegation = edges
        cfg.validate()
        return cfg

    def set_issuer(self, issuer: str, cfg: ElectionConfig) -> None:
        cfg.validate()
        with self._lock:
            self._data["issuers"][issuer] = cfg.to_dict()
            self._save()

    def get_delegations(self, voter: int) -> list[list[int]]:
        with self._lock:
            return [list(p) for p in self._data.get("delegations", {}).get(str(voter), [])]

    def set_delegations(self, voter: int, edges: list[list[int]]) -> None:
        if not 1 <= voter <= self.n:
            raise ValueError("unknown voter")
        base = self.load("default")
        total = base.total_weight
        cap = base.max_weight * total
        for pair in edges:
            if len(pair) != 2:
                raise ValueError("each edge is [delegate, trust]")
            dst, trust = int(pair[0]), int(pair[1])
            if dst == voter or not 1 <= dst <= self.n:
                raise ValueError("delegate must be another known voter")
            if trust <= 0:
                raise ValueError("trust must be positive")
            if base.weights.get(dst, 0) + base.weights.get(voter, 0) > cap:
                raise ValueError(
                    "delegation would let the delegate exceed the weight cap"
                )
        with self._lock:
            self._data.setdefault("delegations", {})[str(voter)] = [
                [int(a), int(b)] for a, b in edges
            ]
            self._save()


@dataclass
class ExecutionRecord:
    command: str
    election_id: str
    status: int
    output: str


class ShimExecutor:
    """Records approved commands without touching the host. A deployment
    substitutes a real executor behind the same callable shape."""

    def __init__(self):
        self.records: list[ExecutionRecord] = []

    def __call__(self, command: str, decision: TallyDecision) -> ExecutionRecord:
        record = ExecutionRecord(
            command=command,
            election_id=decision.election_id,
            status=0,
            output=f"simulated execution of: {command}",
        )
        self.records.append(record)
        return record


class _ServiceShareLog(ShareLog):
    """Voter share log that also emits daemon-log receipts, giving the UI
    a verifiable one-ballot-per-vote trail."""

    def __init__(self, voter: int, log: CommandLog):
        super().__init__()
        self.voter = voter
        self.log = log

    def append(self, election_id, origin, share, vc):
        super().append(election_id, origin, share, vc)
        self.log.append(
            "SHARE_RECEIPT",
            election_id,
            {"voter": self.voter, "origin": origin},
        )


_DAEMON_EVENT_KINDS = {
    "REQUEST": "REQUEST",
    "PARTIAL_TALLY": "PARTIAL_TALLY",
    "DECISION": "DECISION",
    "AUDIT_REFUSED": "AUDIT",
    "AUDIT_REVEAL": "AUDIT",
    "AUDIT_COMPLETE": "AUDIT",
}


class VotingService:
    def __init__(
        self,
        n: int,
        f: int,
        data_dir: str,
        issuer_configs: Optional[dict[str, ElectionConfig]] = None,
        group=TEST_GROUP,
        challenge_bits: int = TEST_CHALLENGE_BITS,
        seed: Optional[int] = None,
    ):
        self.n = n
        self.f = f
        self.group = group
        self.net = LocalNet()
        self.log = CommandLog(os.path.join(data_dir, "command-log.jsonl"))
        self.config_store = ConfigStore(
            os.path.join(data_dir, "config.json"), n, initial=issuer_configs
        )
        self.executor = ShimExecutor()
        base_seed = seed if seed is not None else random.SystemRandom().getrandbits(63)
        coin = SharedSeedCoin(base_seed.to_bytes(8, "big"))
        params = ProtocolParams(group, coin, challenge_bits, n, f)
        self.daemon = DaemonCore(
            self.net,
            n,
            f,
            group,
            random.Random(base_seed ^ 0xD43),
            executor=self._execute,
            on_log=self._on_daemon_log,
        )
        self.net.add_node(self.daemon.pid, _DaemonReceiver(self.daemon))
        self.sources: dict[int, InteractiveSource] = {}
        self.voters: dict[int, VoterNode] = {}
        for pid in range(1, n + 1):
            source = InteractiveSource()
            node = VoterNode(
                pid,
                params,
                self.net,
                self.net,
                random.Random((base_seed << 8) ^ pid),
                source,
                share_log=_ServiceShareLog(pid, self.log),
            )
            self.sources[pid] = source
            self.voters[pid] = node
            self.net.add_node(pid, node)

    # ---- daemon hooks ----

    def _on_daemon_log(self, event: str, data: dict) -> None:
        kind = _DAEMON_EVENT_KINDS.get(event)
        if kind is None:
            return
        payload = dict(data)
        if kind == "AUDIT":
            payload["event"] = event
        election = payload.pop("election", payload.get("of", ""))
        self.log.append(kind, election, payload)

    def _execute(self, command: str, decision: TallyDecision) -> None:
        self.executor(command, decision)
        if command.startswith(CONFIG_COMMAND_PREFIX):
            try:
                update = json.loads(command[len(CONFIG_COMMAND_PREFIX):])
                cfg = ElectionConfig.from_dict(update["config"])
                self.config_store.set_issuer(update["issuer"], cfg)
            except (ValueError, KeyError, TypeError):
                pass  # malformed config command: executed as a no-op

    # ---- operations ----

    def issue(
        self,
        issuer: str,
        command: str,
        emergency: bool = False,
        config: Optional[ElectionConfig] = None,
        inactive: Optional[set[int]] = None,
    ) -> str:
        cfg = config if config is not None else self.config_store.load(issuer)
        return self.net.run(
            lambda: self.daemon.issue(
                issuer, command, cfg, emergency=emergency, inactive=inactive
            )
        )

    def cast_vote(self, election_id: str, voter: int, vote: int) -> None:
        if voter not in self.sources:
            raise LookupError("unknown voter")
        if vote not in (0, 1):
            raise ValueError("vote must be 0 or 1")
        self.net.run(lambda: self.sources[voter].cast(election_id, vote))

    def pending(self, voter: int) -> list[dict]:
        if voter not in self.sources:
            raise LookupError("unknown voter")
        out = []
        for eid, (command, weights, _) in list(self.sources[voter].pending.items()):
            rec = self.daemon.elections.get(eid)
            if rec is None or rec.decided:
                continue
            out.append(
                {
                    "electionId": eid,
                    "issuer": rec.issuer,
                    "command": command,
                    "weights": {str(k): v for k, v in weights.items()},
                    "mode": "EMERGENCY" if rec.emergency else "NORMAL",
                    "threshold": str(rec.config.threshold),
                    "timeout": rec.config.timeout,
                }
            )
        return out

    def status(self, election_id: str) -> dict:
        rec = self.daemon.elections.get(election_id)
        if rec is None:
            raise LookupError("unknown election")
        out = {
            "electionId": election_id,
            "issuer": rec.issuer,
            "command": rec.command,
            "emergency": rec.emergency,
            "auditOf": rec.audit_of,
            "status": "decided" if rec.decided else "pending",
            "effectiveWeights": {str(k): v for k, v in rec.effective_weights.items()},
        }
        if rec.decision is not None:
            out["decision"] = {
                "approved": rec.decision.approved,
                "tally": rec.decision.tally,
                "weightSum": rec.decision.weight_sum,
                "mode": rec.decision.mode,
            }
            out["execution"] = next(
                (
                    {"status": r.status, "output": r.output}
                    for r in self.executor.records
                    if r.election_id == election_id
                ),
                None,
            )
        return out

    def start_audit(self, op_id: str) -> str:
        return self.net.run(lambda: self.daemon.start_audit(op_id))

    def audit_status(self, audit_id: str) -> dict:
        audit = self.daemon.audits.get(audit_id)
        if audit is None:
            raise LookupError("unknown audit")
        return {
            "auditId": audit_id,
            "opId": audit.op_id,
            "approved": audit.approved,
            "complete": audit.complete,
            "revealed": {str(k): v for k, v in sorted(audit.revealed.items())},
        }

    def read_log(self, after: int = 0, election_id: Optional[str] = None,
                 kind: Optional[str] = None) -> list[dict]:
        return [
            e.to_dict()
            for e in self.log.read(election_id=election_id, kind=kind, after=after)
        ]

    def close(self) -> None:
        self.net.close()
        self.log.close()


class _DaemonReceiver:
    def __init__(self, core: DaemonCore):
        self.core = core

    def receive(self, msg) -> None:
        self.core.receive(msg)


# ---- HTTP layer ----

from pydantic import BaseModel


class IssueBody(BaseModel):
    issuer: str = "default"
    command: str
    emergency: bool = False
    inactive: Optional[list[int]] = None


class VoteBody(BaseModel):
    voterId: int
    vote: int


class DelegationBody(BaseModel):
    edges: list[list[int]]


class AuditBody(BaseModel):
    opId: str


def create_app(service: VotingService):
    from fastapi import FastAPI, HTTPException, Query

    app = FastAPI(title="covote daemon")
    app.state.service = service

    @app.post("/elections")
    def post_election(body: IssueBody):
        try:
            eid = service.issue(
                body.issuer,
                body.command,
                emergency=body.emergency,
                inactive=set(body.inactive) if body.inactive else None,
            )
        except KeyError as exc:
            raise HTTPException(400, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(400, detail=str(exc))
        return {"electionId": eid}

    @app.get("/elections")
    def list_pending(pending: int = Query(...)):
        try:
            return service.pending(pending)
        except LookupError as exc:
            raise HTTPException(404, detail=str(exc))

    @app.get("/elections/{election_id}")
    def get_election(election_id: str):
        try:
            return service.status(election_id)
        except LookupError as exc:
            raise HTTPException(404, detail=str(exc))

    @app.post("/elections/{election_id}/vote")
    def post_vote(election_id: str, body: VoteBody):
        try:
            service.cast_vote(election_id, body.voterId, body.vote)
        except KeyError as exc:
            raise HTTPException(409, detail="vote already cast")
        except LookupError as exc:
            raise HTTPException(404, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(400, detail=str(exc))
        return {"accepted": True}

    @app.get("/delegations/{voter_id}")
    def get_delegations(voter_id: int):
        if not 1 <= voter_id <= service.n:
            raise HTTPException(404, detail="unknown voter")
        return {"voterId": voter_id, "edges": service.config_store.get_delegations(voter_id)}

    @app.put("/delegations/{voter_id}")
    def put_delegations(voter_id: int, body: DelegationBody):
        try:
            service.config_store.set_delegations(voter_id, body.edges)
        except ValueError as exc:
            raise HTTPException(400, detail=str(exc))
        return {"voterId": voter_id, "edges": service.config_store.get_delegations(voter_id)}

    @app.post("/audits")
    def post_audit(body: AuditBody):
        try:
            aid = service.start_audit(body.opId)
        except KeyError as exc:
            raise HTTPException(404, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(400, detail=str(exc))
        return {"auditId": aid}

    @app.get("/audits/{audit_id}")
    def get_audit(audit_id: str):
        try:
            return service.audit_status(audit_id)
        except LookupError as exc:
            raise HTTPException(404, detail=str(exc))

    @app.get("/log")
    def get_log(after: int = 0, election: Optional[str] = None,
                kind: Optional[str] = None):
        return service.read_log(after=after, election_id=election, kind=kind)

    return app


def run_daemon(
    n: int = 4, f: int = 1, data_dir: Optional[str] = None,
    listen: Optional[str] = None,
):
    """Entry point for `covote daemon`: serve the HTTP API with uvicorn."""
    import uvicorn

    data_dir = data_dir or os.environ.get(DATA_DIR_ENV, "./covote-data")
    listen = listen or os.environ.get(LISTEN_ENV, "127.0.0.1:8400")
    host, _, port = listen.partition(":")
    service = VotingService(n, f, data_dir)
    app = create_app(service)
    uvicorn.run(app, host=host, port=int(port or 8400), log_level="warning")
