"""Scenario harness: runs primitives and whole elections over the
deterministic simulator, injects Byzantine behavior, checks invariants
across many seeded schedules, and collects performance trend metrics.

The harness keeps plaintext ground truth (every honest cast vote) so each
engine decision can be validated against the clear-text weighted sum it is
supposed to equal.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .aba import AbaInstance
from .avss import AvssInstance, encode_dealing
from .binary_proof import TEST_CHALLENGE_BITS, isbinary_prove
from .brb import BrbInstance
from .coin import SharedSeedCoin
from .config import ElectionConfig, TrustEdge
from .daemon_core import DaemonCore, TallyDecision
from .groups import TEST_GROUP
from .pedersen import commit
from .shamir import shamir_share
from .simnet import Behavior, SimClock, Simulator, SimTransport
from .transport import DAEMON_ID, InstanceTag, Message, ProtocolContext
from .voter import PolicySource, ProtocolParams, VoterNode


@dataclass
class ScenarioSpec:
    n: int
    f: int
    votes: dict[int, Optional[int]]  # honest intent; None = abstain
    weights: Optional[dict[int, int]] = None  # default: uniform 1
    threshold: Fraction = Fraction(1, 2)
    max_weight: Fraction = Fraction(1)
    timeout: float = 2.0
    emergency: bool = False
    delegation: list[TrustEdge] = field(default_factory=list)
    inactive: set[int] = field(default_factory=set)
    adversary: dict[int, Behavior] = field(default_factory=dict)
    think_delays: dict[int, float] = field(default_factory=dict)
    seed: int = 0
    latency: float = 0.005
    gst_time: float = 0.0
    pre_gst_spread: float = 0.5
    process_cost: float = 0.0  # simulated per-message handling time

    def validate(self) -> None:
        if len(self.adversary) > self.f:
            raise ValueError("adversary exceeds the fault budget f")
        if self.n < 3 * self.f + 1:
            raise ValueError("need n >= 3f+1")


@dataclass
class RunMetrics:
    model_time: float
    message_counts: dict[str, int]
    total_messages: int
    decision: Optional[TallyDecision]
    early_decision: Optional[TallyDecision] = None
    accepted: Optional[list[int]] = None
    ground_truth_votes: dict[int, int] = field(default_factory=dict)
    ground_truth_tally: Optional[int] = None
    weight_sum: Optional[int] = None
    peak_bytes: int = 0
    deadlock: bool = False
    emitted_voters: int = 0


def deep_sizeof(obj, _seen=None) -> int:
    """Recursive sys.getsizeof over containers and object dicts."""
    if _seen is None:
        _seen = set()
    oid = id(obj)
    if oid in _seen:
        return 0
    _seen.add(oid)
    size = sys.getsizeof(obj)
    if isinstance(obj, dict):
        size += sum(deep_sizeof(k, _seen) + deep_sizeof(v, _seen) for k, v in obj.items())
    elif isinstance(obj, (list, tuple, set, frozenset)):
        size += sum(deep_sizeof(x, _seen) for x in obj)
    elif hasattr(obj, "__dict__"):
        size += deep_sizeof(vars(obj), _seen)
    return size


# ---- Byzantine voter variants ----


class InvalidVoteVoter(VoterNode):
    """Shares an out-of-range vote value with a proof that cannot verify."""

    def __init__(self, *args, bad_vote: int = 2, **kwargs):
        super().__init__(*args, **kwargs)
        self.bad_vote = bad_vote

    def _cast_ballot(self, st, vote):
        group = self.params.group
        blinding = group.random_scalar(self.rng)
        self._avss(st, self.pid).share(self.bad_vote % group.q, blinding)
        # a proof for an unrelated honest statement: verifies against the
        # wrong commitment, so honest voters reject the ballot
        c = commit(group, 1, blinding)
        proof = isbinary_prove(group, 1, blinding, c, self.rng, self.params.challenge_bits)
        self._proof_brb(st, self.pid).broadcast(proof.encode(group))


class InvalidSharesVoter(VoterNode):
    """Deals a valid binary ballot but corrupts the private shares sent to
    some recipients; they must fall back to second-layer recovery."""

    def __init__(self, *args, corrupt: Optional[set[int]] = None, **kwargs):
        super().__init__(*args, **kwargs)
        self.corrupt = corrupt

    def _cast_ballot(self, st, vote):
        if st.vote_cast is not None:
            return
        st.vote_cast = vote
        self.cast_votes[st.election_id] = vote
        group = self.params.group
        n, k = self.params.n, self.params.k
        blinding = group.random_scalar(self.rng)
        c = commit(group, vote, blinding)
        proof = isbinary_prove(group, vote, blinding, c, self.rng, self.params.challenge_bits)
        shares, vc = shamir_share(group, vote, blinding, k, n, self.rng)
        sub = [
            shamir_share(group, s.vote_share, s.blinding_share, k, n, self.rng)
            for s in shares
        ]
        avss = self._avss(st, self.pid)
        avss._shared = True
        avss.brb.broadcast(encode_dealing(group, vc, [svc for _, svc in sub]))
        corrupt = self.corrupt if self.corrupt is not None else {2}
        for j in range(1, n + 1):
            share = shares[j - 1]
            if j in corrupt:
                share = type(share)(
                    share.index, (share.vote_share + 1) % group.q, share.blinding_share
                )
            avss.ctx.send(
                j,
                {
                    "type": "SHARE",
                    "share": share.encode(group).hex(),
                    "subshares": {
                        str(i): sub[i - 1][0][j - 1].encode(group).hex()
                        for i in range(1, n + 1)
                    },
                },
            )
        self._proof_brb(st, self.pid).broadcast(proof.encode(group))


class EquivocatingVoter(VoterNode):
    """Sends two contradictory dealings to different halves of the voters.
    Reliable broadcast must keep any delivered ballot consistent."""

    def _cast_ballot(self, st, vote):
        group = self.params.group
        n, k = self.params.n, self.params.k
        dealings = []
        for v in (0, 1):
            blinding = group.random_scalar(self.rng)
            shares, vc = shamir_share(group, v, blinding, k, n, self.rng)
            sub = [
                shamir_share(group, s.vote_share, s.blinding_share, k, n, self.rng)
                for s in shares
            ]
            c = vc.coeff_commits[0]
            proof = isbinary_prove(
                group, v, blinding, c, self.rng, self.params.challenge_bits
            )
            dealings.append((shares, vc, sub, proof))
        avss = self._avss(st, self.pid)
        brb_tag = avss.brb.ctx.tag
        proof_tag = InstanceTag(st.election_id, "brb-proof", self.pid)
        half = n // 2
        for j in range(1, n + 1):
            shares, vc, sub, proof = dealings[0] if j <= half else dealings[1]
            payload = {
                "type": "SEND",
                "value": encode_dealing(group, vc, [svc for _, svc in sub]).hex(),
            }
            self.transport.send(Message(self.pid, j, brb_tag, payload))
            avss.ctx.send(
                j,
                {
                    "type": "SHARE",
                    "share": shares[j - 1].encode(group).hex(),
                    "subshares": {
                        str(i): sub[i - 1][0][j - 1].encode(group).hex()
                        for i in range(1, n + 1)
                    },
                },
            )
            self.transport.send(
                Message(
                    self.pid,
                    j,
                    proof_tag,
                    {"type": "SEND", "value": proof.encode(group).hex()},
                )
            )


_NODE_BEHAVIORS = {"EQUIVOCATE", "INVALID_VOTE", "INVALID_SHARES"}


def _make_voter(pid: int, spec: ScenarioSpec, params, transport, clock, rng):
    behavior = spec.adversary.get(pid)
    vote = spec.votes.get(pid)
    source = PolicySource(
        vote, delay=spec.think_delays.get(pid, 0.0), clock=clock
    )
    common = dict(
        params=params, transport=transport, clock=clock, rng=rng,
        vote_source=source,
    )
    if behavior is None or behavior.kind not in _NODE_BEHAVIORS:
        return VoterNode(pid, **common)
    if behavior.kind == "INVALID_VOTE":
        return InvalidVoteVoter(pid, bad_vote=behavior.vote, **common)
    if behavior.kind == "INVALID_SHARES":
        return InvalidSharesVoter(pid, **common)
    return EquivocatingVoter(pid, **common)


class _DaemonAdapter:
    def __init__(self, core: DaemonCore):
        self.core = core

    def receive(self, msg: Message) -> None:
        self.core.receive(msg)


@dataclass
class ElectionRun:
    spec: ScenarioSpec
    sim: Simulator
    daemon: DaemonCore
    voters: dict[int, VoterNode]
    election_id: str

    def correct_ids(self) -> list[int]:
        return [p for p in self.voters if p not in self.spec.adversary]

    def metrics(self) -> RunMetrics:
        sim, spec = self.sim, self.spec
        rec = self.daemon.elections[self.election_id]
        truth = {
            p: v.cast_votes[self.election_id]
            for p, v in self.voters.items()
            if self.election_id in v.cast_votes
        }
        accepted = None
        weight_sum = None
        truth_tally = None
        emitted = 0
        for p in self.correct_ids():
            st = self.voters[p].elections.get(self.election_id)
            if st is None:
                continue
            if st.emitted:
                emitted += 1
            if accepted is None and st.emitted:
                accepted = sorted(
                    i for i in range(1, spec.n + 1) if st.final_dec(i) == 1
                )
        if accepted is not None:
            weight_sum = sum(rec.effective_weights.get(i, 0) for i in accepted)
            if all(i in truth for i in accepted):
                truth_tally = sum(
                    rec.effective_weights.get(i, 0) * truth[i] for i in accepted
                )
        decision = rec.decision
        early = None
        if decision is not None and decision.mode == "EARLY":
            early = decision
        peak = max(
            (deep_sizeof(v.elections) for v in self.voters.values()), default=0
        )
        return RunMetrics(
            model_time=sim.time,
            message_counts=dict(sim.message_counts),
            total_messages=sim.total_messages,
            decision=decision,
            early_decision=early,
            accepted=accepted,
            ground_truth_votes=truth,
            ground_truth_tally=truth_tally,
            weight_sum=weight_sum,
            peak_bytes=peak,
            deadlock=decision is None and sim.idle,
            emitted_voters=emitted,
        )


def build_election(spec: ScenarioSpec, group=TEST_GROUP, challenge_bits=TEST_CHALLENGE_BITS) -> ElectionRun:
    spec.validate()
    import random as _random

    sim = Simulator(
        seed=spec.seed,
        latency=spec.latency,
        gst_time=spec.gst_time,
        pre_gst_spread=spec.pre_gst_spread,
        process_cost=spec.process_cost,
    )
    transport = SimTransport(sim)
    clock = SimClock(sim)
    coin = SharedSeedCoin(spec.seed.to_bytes(8, "big", signed=True))
    params = ProtocolParams(group, coin, challenge_bits, spec.n, spec.f)
    weights = spec.weights or {i: 1 for i in range(1, spec.n + 1)}
    config = ElectionConfig(
        weights=dict(weights),
        threshold=spec.threshold,
        delegation=list(spec.delegation),
        max_weight=spec.max_weight,
        timeout=spec.timeout,
    )
    daemon = DaemonCore(
        transport, spec.n, spec.f, group, _random.Random(spec.seed ^ 0xD43),
    )
    sim.add_node(DAEMON_ID, _DaemonAdapter(daemon))
    voters = {}
    for pid in range(1, spec.n + 1):
        rng = _random.Random((spec.seed << 8) ^ pid)
        node = _make_voter(pid, spec, params, transport, clock, rng)
        voters[pid] = node
        sim.add_node(pid, node)
        behavior = spec.adversary.get(pid)
        if behavior is not None and behavior.kind not in _NODE_BEHAVIORS:
            sim.adversary[pid] = behavior
    eid = daemon.issue(
        "operator",
        "apply config",
        config,
        emergency=spec.emergency,
        inactive=spec.inactive or None,
    )
    return ElectionRun(spec, sim, daemon, voters, eid)


def run_scenario(spec: ScenarioSpec, until: Optional[float] = None, **kwargs) -> RunMetrics:
    run = build_election(spec, **kwargs)
    run.sim.run(until=until)
    return run.metrics()


# ---- primitive harnesses for schedule exploration ----


class _WrapperNode:
    def __init__(self, instance):
        self.instance = instance

    def receive(self, msg: Message) -> None:
        self.instance.receive(msg.sender, msg.payload)


class _AvssWrapper:
    def __init__(self, instance: AvssInstance):
        self.instance = instance

    def receive(self, msg: Message) -> None:
        if msg.tag.kind == "avss-com":
            self.instance.brb.receive(msg.sender, msg.payload)
        else:
            self.instance.receive(msg.sender, msg.payload)


def _primitive_sim(n: int, f: int, seed: int, adversary: dict[int, Behavior]):
    sim = Simulator(seed=seed, gst_time=10.0, pre_gst_spread=0.3)
    transport = SimTransport(sim)
    for pid, b in adversary.items():
        if b.kind not in _NODE_BEHAVIORS:
            sim.adversary[pid] = b
    return sim, transport


def run_brb_schedule(
    n: int, f: int, seed: int, adversary: dict[int, Behavior], dealer: int = 1,
    value: bytes = b"payload",
) -> dict:
    sim, transport = _primitive_sim(n, f, seed, adversary)
    tag = InstanceTag("e", "brb", dealer)
    delivered: dict[int, bytes] = {}
    insts = {}
    for pid in range(1, n + 1):
        ctx = ProtocolContext(transport, tag, pid, n, f)
        insts[pid] = BrbInstance(ctx, lambda v, p=pid: delivered.__setitem__(p, v))
        sim.add_node(pid, _WrapperNode(insts[pid]))
    dealer_behavior = adversary.get(dealer)
    if dealer_behavior is not None and dealer_behavior.kind == "EQUIVOCATE":
        half = n // 2
        for j in range(1, n + 1):
            v = b"left" if j <= half else b"right"
            transport.send(Message(dealer, j, tag, {"type": "SEND", "value": v.hex()}))
    else:
        insts[dealer].broadcast(value)
    sim.run()
    correct = [p for p in range(1, n + 1) if p not in adversary]
    got = {p: delivered[p] for p in correct if p in delivered}
    violations = []
    if len(set(got.values())) > 1:
        violations.append("brb-consistency")
    if got and len(got) != len(correct):
        violations.append("brb-totality")
    if dealer not in adversary:
        if any(v != value for v in got.values()) or len(got) != len(correct):
            violations.append("brb-validity")
    return {"violations": violations, "delivered": got, "messages": sim.total_messages}


def run_aba_schedule(
    n: int, f: int, seed: int, adversary: dict[int, Behavior],
    proposals: dict[int, int],
) -> dict:
    sim, transport = _primitive_sim(n, f, seed, adversary)
    tag = InstanceTag("e", "aba", 1)
    coin = SharedSeedCoin(seed.to_bytes(8, "big", signed=True))
    decided: dict[int, int] = {}
    insts = {}
    for pid in range(1, n + 1):
        ctx = ProtocolContext(transport, tag, pid, n, f)
        insts[pid] = AbaInstance(ctx, coin, lambda b, p=pid: decided.__setitem__(p, b))
        sim.add_node(pid, _WrapperNode(insts[pid]))
    for pid, b in adversary.items():
        if b.kind == "EQUIVOCATE":
            # contradictory estimates and decide hints, split down the middle
            for j in range(1, n + 1):
                v = j % 2
                transport.send(
                    Message(pid, j, tag, {"type": "EST", "round": 1, "v": v})
                )
                transport.send(
                    Message(pid, j, tag, {"type": "AUX", "round": 1, "v": 1 - v})
                )
                transport.send(Message(pid, j, tag, {"type": "DECIDE", "v": v}))
    for pid, v in proposals.items():
        if pid not in adversary:
            insts[pid].propose(v)
    sim.run()
    correct = [p for p in range(1, n + 1) if p not in adversary]
    proposers = [p for p in correct if p in proposals]
    got = {p: decided[p] for p in correct if p in decided}
    violations = []
    if len(set(got.values())) > 1:
        violations.append("aba-agreement")
    inputs = {proposals[p] for p in proposers}
    if len(inputs) == 1 and any(v != next(iter(inputs)) for v in got.values()):
        violations.append("aba-validity")
    if len(proposers) == len(correct) and len(got) != len(correct):
        violations.append("aba-termination")
    return {"violations": violations, "decided": got, "messages": sim.total_messages}


def run_avss_schedule(
    n: int, f: int, seed: int, adversary: dict[int, Behavior], dealer: int = 1,
    secret: int = 1, group=TEST_GROUP,
) -> dict:
    import random as _random

    sim, transport = _primitive_sim(n, f, seed, adversary)
    tag = InstanceTag("e", "avss", dealer)
    brb_tag = InstanceTag("e", "avss-com", dealer)
    done: dict[int, tuple] = {}
    insts = {}
    for pid in range(1, n + 1):
        ctx = ProtocolContext(transport, tag, pid, n, f)
        brb_ctx = ProtocolContext(transport, brb_tag, pid, n, f)
        rng = _random.Random((seed << 8) ^ pid)
        insts[pid] = AvssInstance(
            ctx, brb_ctx, group, rng,
            lambda s, vc, p=pid: done.__setitem__(p, (s, vc)),
        )
        sim.add_node(pid, _AvssWrapper(insts[pid]))
    blinding = _random.Random(seed ^ 0xB11).randrange(group.q)
    dealer_behavior = adversary.get(dealer)
    if dealer_behavior is not None and dealer_behavior.kind == "INVALID_SHARES":
        _deal_with_corruption(insts[dealer], group, secret, blinding, corrupt={2})
    else:
        insts[dealer].share(secret, blinding)
    sim.run()
    correct = [p for p in range(1, n + 1) if p not in adversary]
    got = {p: done[p] for p in correct if p in done}
    violations = []
    vcs = {vc.encode(group) for _, vc in got.values()}
    if len(vcs) > 1:
        violations.append("avss-agreement")
    from .pedersen import verify_share_against_commitment
    for p, (s, vc) in got.items():
        if s.index != p or not verify_share_against_commitment(
            group, p, s.vote_share, s.blinding_share, vc
        ):
            violations.append("avss-agreement")
            break
    if dealer not in adversary or (
        dealer_behavior is not None and dealer_behavior.kind == "INVALID_SHARES"
    ):
        if len(got) != len(correct):
            violations.append("avss-validity")
        elif len(got) >= f + 1:
            from .shamir import interpolate

            rec, _ = interpolate(group, [s for s, _ in got.values()], f + 1)
            if rec != secret % group.q:
                violations.append("avss-validity")
    elif got and len(got) != len(correct):
        violations.append("avss-totality")
    return {"violations": violations, "completed": sorted(got), "messages": sim.total_messages}


def _deal_with_corruption(inst: AvssInstance, group, secret, blinding, corrupt: set[int]):
    n, k = inst.ctx.n, inst.k
    shares, vc = shamir_share(group, secret, blinding, k, n, inst.rng)
    sub = [
        shamir_share(group, s.vote_share, s.blinding_share, k, n, inst.rng)
        for s in shares
    ]
    inst._shared = True
    inst.brb.broadcast(encode_dealing(group, vc, [svc for _, svc in sub]))
    for j in range(1, n + 1):
        share = shares[j - 1]
        if j in corrupt:
            share = type(share)(
                share.index, (share.vote_share + 1) % group.q, share.blinding_share
            )
        inst.ctx.send(
            j,
            {
                "type": "SHARE",
                "share": share.encode(group).hex(),
                "subshares": {
                    str(i): sub[i - 1][0][j - 1].encode(group).hex()
                    for i in range(1, n + 1)
                },
            },
        )


_RUNNERS = {
    "brb": lambda n, f, seed, adv: run_brb_schedule(n, f, seed, adv),
    "aba": lambda n, f, seed, adv: run_aba_schedule(
        n, f, seed, adv, {p: p % 2 for p in range(1, n + 1)}
    ),
    "aba-unanimous": lambda n, f, seed, adv: run_aba_schedule(
        n, f, seed, adv, {p: 1 for p in range(1, n + 1)}
    ),
    "avss": lambda n, f, seed, adv: run_avss_schedule(n, f, seed, adv),
}


def explore_schedules(
    primitive: str,
    n: int,
    f: int,
    schedules: int,
    adversary: dict[int, Behavior],
    seed0: int = 0,
) -> list[dict]:
    """Run `schedules` seeded reorderings of one primitive under one
    adversary configuration; returns counterexample records (empty = clean)."""
    if n > 7:
        raise ValueError("schedule exploration is for small n (<= 7)")
    if len(adversary) > f:
        raise ValueError("adversary exceeds the fault budget f")
    runner = _RUNNERS[primitive]
    violations = []
    for s in range(schedules):
        seed = seed0 + s
        result = runner(n, f, seed, adversary)
        if result["violations"]:
            violations.append({"seed": seed, **result})
    return violations


# ---- performance sweeps ----


def message_sweep(ns=(4, 7, 10, 13), seed: int = 11) -> dict[int, int]:
    """Total transport messages for one fault-free election at each n."""
    out = {}
    for n in ns:
        f = (n - 1) // 3
        spec = ScenarioSpec(
            n=n, f=f, votes={i: i % 2 for i in range(1, n + 1)}, seed=seed,
            pre_gst_spread=0.0,
        )
        out[n] = run_scenario(spec).total_messages
    return out


def cubic_fit(counts: dict[int, int]) -> tuple[float, float, float]:
    """Least-squares c for counts ~ c*n^3; returns (c, min ratio, max ratio)
    of observed/fitted."""
    num = sum(c * n**3 for n, c in counts.items())
    den = sum(n**6 for n in counts)
    c = num / den
    ratios = [counts[n] / (c * n**3) for n in counts]
    return c, min(ratios), max(ratios)


def latency_sweep(
    f_values=(1, 5), latencies=(0.005, 0.150), seed: int = 7, runs: int = 3,
    process_cost: float = 0.0002,
) -> dict[int, dict[float, float]]:
    """Mean model-time to decision per (f, latency). The per-message
    processing cost makes larger systems compute-bound, so the relative
    penalty of slow links shrinks as f grows."""
    out: dict[int, dict[float, float]] = {}
    for f in f_values:
        n = 3 * f + 1
        out[f] = {}
        for lat in latencies:
            times = []
            for r in range(runs):
                spec = ScenarioSpec(
                    n=n, f=f, votes={i: 1 for i in range(1, n + 1)},
                    seed=seed + r, latency=lat, pre_gst_spread=0.0, timeout=0.001,
                    process_cost=process_cost,
                )
                m = run_scenario(spec)
                if m.decision is not None:
                    times.append(m.model_time)
            out[f][lat] = sum(times) / len(times) if times else float("nan")
    return out
