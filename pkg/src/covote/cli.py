"""Command-line front end: issue elections against a running daemon, run
audits, inspect status and the log, and drive the simulator and leakage
analyzer locally.

Exit codes: 0 approved, 1 rejected, 2 error (unreachable daemon, timeout,
bad input).
"""

from __future__ import annotations

import json
import sys
import time

import click
import httpx

DEFAULT_DAEMON = "http://127.0.0.1:8400"

EXIT_APPROVED = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2


def _client(ctx) -> httpx.Client:
    return httpx.Client(base_url=ctx.obj["daemon"], timeout=10.0)


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_ERROR)


@click.group()
@click.option("--daemon", default=DEFAULT_DAEMON, show_default=True,
              help="daemon API base URL")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
@click.pass_context
def main(ctx, daemon, as_json):
    """Distributed approval voting for privileged commands."""
    ctx.ensure_object(dict)
    ctx.obj["daemon"] = daemon
    ctx.obj["json"] = as_json


def _emit(ctx, data: dict, text: str):
    if ctx.obj["json"]:
        click.echo(json.dumps(data, indent=2, sort_keys=True))
    else:
        click.echo(text)


def _poll_status(client, election_id: str, wait: float) -> dict:
    deadline = time.monotonic() + wait
    while True:
        status = client.get(f"/elections/{election_id}").json()
        if status.get("status") == "decided" or time.monotonic() >= deadline:
            return status
        time.sleep(0.2)


@main.command()
@click.argument("command")
@click.option("--issuer", default="default", show_default=True)
@click.option("-e", "--emergency", is_flag=True, help="run as an emergency election")
@click.option("--wait", default=120.0, show_default=True,
              help="seconds to wait for the decision")
@click.pass_context
def issue(ctx, command, issuer, emergency, wait):
    """Issue COMMAND for approval and wait for the decision."""
    try:
        with _client(ctx) as client:
            resp = client.post(
                "/elections",
                json={"issuer": issuer, "command": command, "emergency": emergency},
            )
            if resp.status_code != 200:
                _fail(f"daemon refused the election: {resp.text}")
            eid = resp.json()["electionId"]
            status = _poll_status(client, eid, wait)
    except httpx.HTTPError as exc:
        _fail(f"daemon unreachable: {exc}")
    decision = status.get("decision")
    if decision is None:
        _emit(ctx, status, f"election {eid}: still pending after {wait:.0f}s")
        sys.exit(EXIT_ERROR)
    verdict = "APPROVED" if decision["approved"] else "REJECTED"
    lines = [
        f"election {eid}: {verdict} ({decision['mode']})",
        f"tally {decision['tally']} of weight {decision['weightSum']}",
    ]
    execution = status.get("execution")
    if execution:
        lines.append(f"exit status {execution['status']}: {execution['output']}")
    _emit(ctx, status, "\n".join(lines))
    sys.exit(EXIT_APPROVED if decision["approved"] else EXIT_REJECTED)


@main.command()
@click.argument("op_id")
@click.option("--wait", default=120.0, show_default=True)
@click.pass_context
def audit(ctx, op_id, wait):
    """Request an audit of election OP_ID and print the revealed votes."""
    try:
        with _client(ctx) as client:
            resp = client.post("/audits", json={"opId": op_id})
            if resp.status_code != 200:
                _fail(f"audit refused: {resp.text}")
            aid = resp.json()["auditId"]
            deadline = time.monotonic() + wait
            while True:
                status = client.get(f"/audits/{aid}").json()
                if status.get("complete") or time.monotonic() >= deadline:
                    break
                time.sleep(0.2)
    except httpx.HTTPError as exc:
        _fail(f"daemon unreachable: {exc}")
    if status.get("approved") is False:
        _emit(ctx, status, f"audit {aid}: REFUSED by the voters")
        sys.exit(EXIT_REJECTED)
    if not status.get("complete"):
        _emit(ctx, status, f"audit {aid}: still pending after {wait:.0f}s")
        sys.exit(EXIT_ERROR)
    lines = [f"audit {aid} of election {op_id}:"]
    for voter, vote in sorted(status["revealed"].items(), key=lambda kv: int(kv[0])):
        lines.append(f"  voter {voter}: {'approve' if vote else 'reject'}")
    _emit(ctx, status, "\n".join(lines))
    sys.exit(EXIT_APPROVED)


@main.command()
@click.argument("election_id")
@click.pass_context
def status(ctx, election_id):
    """Show the current state of one election."""
    try:
        with _client(ctx) as client:
            resp = client.get(f"/elections/{election_id}")
    except httpx.HTTPError as exc:
        _fail(f"daemon unreachable: {exc}")
    if resp.status_code == 404:
        _fail("unknown election")
    data = resp.json()
    decision = data.get("decision")
    text = f"election {election_id}: {data['status']}"
    if decision:
        verdict = "APPROVED" if decision["approved"] else "REJECTED"
        text += f" -> {verdict} ({decision['mode']})"
    _emit(ctx, data, text)


@main.command()
@click.option("--after", default=0, show_default=True)
@click.option("--election", default=None)
@click.option("--kind", default=None)
@click.pass_context
def log(ctx, after, election, kind):
    """Print daemon log entries."""
    try:
        with _client(ctx) as client:
            params = {"after": after}
            if election:
                params["election"] = election
            if kind:
                params["kind"] = kind
            entries = client.get("/log", params=params).json()
    except httpx.HTTPError as exc:
        _fail(f"daemon unreachable: {exc}")
    if ctx.obj["json"]:
        click.echo(json.dumps(entries, indent=2, sort_keys=True))
        return
    for e in entries:
        click.echo(f"{e['seq']:>5}  {e['kind']:<14} {e['election'][:12]}  "
                   f"{json.dumps(e['payload'], sort_keys=True)}")


@main.command()
@click.argument("election_id")
@click.argument("voter_id", type=int)
@click.argument("vote", type=click.Choice(["approve", "reject", "1", "0"]))
@click.pass_context
def vote(ctx, election_id, voter_id, vote):
    """Cast VOTER_ID's vote in ELECTION_ID."""
    bit = 1 if vote in ("approve", "1") else 0
    try:
        with _client(ctx) as client:
            resp = client.post(
                f"/elections/{election_id}/vote",
                json={"voterId": voter_id, "vote": bit},
            )
    except httpx.HTTPError as exc:
        _fail(f"daemon unreachable: {exc}")
    if resp.status_code == 409:
        _fail("vote already cast")
    if resp.status_code != 200:
        _fail(resp.text)
    _emit(ctx, {"accepted": True}, "vote accepted")


@main.command()
@click.option("--n", default=4, show_default=True)
@click.option("--f", default=1, show_default=True)
@click.option("--votes", default=None,
              help="comma-separated bits per voter, default all approve")
@click.option("--latency", type=click.Choice(["low", "medium", "high"]),
              default="low", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--emergency", is_flag=True)
@click.option("--timeout", default=1.0, show_default=True)
@click.pass_context
def simulate(ctx, n, f, votes, latency, seed, emergency, timeout):
    """Run one simulated election locally and report metrics."""
    from .scenarios import ScenarioSpec, run_scenario
    from .simnet import LATENCY_PRESETS

    if votes is None:
        vote_map = {i: 1 for i in range(1, n + 1)}
    else:
        bits = [int(b) for b in votes.split(",")]
        if len(bits) != n:
            _fail(f"need {n} votes, got {len(bits)}")
        vote_map = {i: bits[i - 1] for i in range(1, n + 1)}
    try:
        spec = ScenarioSpec(
            n=n, f=f, votes=vote_map, seed=seed, emergency=emergency,
            latency=LATENCY_PRESETS[latency], timeout=timeout,
        )
        metrics = run_scenario(spec)
    except ValueError as exc:
        _fail(str(exc))
    decision = metrics.decision
    data = {
        "modelTime": metrics.model_time,
        "totalMessages": metrics.total_messages,
        "messageCounts": metrics.message_counts,
        "accepted": metrics.accepted,
        "decision": None if decision is None else {
            "approved": decision.approved,
            "tally": decision.tally,
            "weightSum": decision.weight_sum,
            "mode": decision.mode,
        },
    }
    if decision is None:
        _emit(ctx, data, "no decision reached (liveness violation)")
        sys.exit(EXIT_ERROR)
    verdict = "APPROVED" if decision.approved else "REJECTED"
    _emit(ctx, data,
          f"{verdict} ({decision.mode}) tally {decision.tally}/{decision.weight_sum} "
          f"in {metrics.model_time:.3f}s model time, {metrics.total_messages} messages")
    sys.exit(EXIT_APPROVED if decision.approved else EXIT_REJECTED)


@main.command()
@click.argument("observations", type=click.Path(exists=True))
@click.pass_context
def leakage(ctx, observations):
    """Analyze worst-case vote disclosure from a JSON observations file.

    Format: {"n": 4, "f": 1, "weights": {"1": 1, ...},
             "rounds": [{"tally": 2, "weightSum": 3}, ...]}
    """
    from .leakage import ObservationRound, leakage_bound

    with open(observations, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        n, f = int(data["n"]), int(data["f"])
        weights = {int(k): int(v) for k, v in data["weights"].items()}
        rounds = [
            ObservationRound(
                int(r["tally"]), weights, r.get("weightSum")
            )
            for r in data["rounds"]
        ]
        report = leakage_bound(rounds, n, f)
    except (KeyError, ValueError) as exc:
        _fail(str(exc))
    d = report.to_dict()
    if ctx.obj["json"]:
        click.echo(json.dumps(d, indent=2, sort_keys=True))
        return
    click.echo(f"voters: {n}, byzantine bound: {f}")
    for i, (bits, cum, count) in enumerate(
        zip(d["perRoundBits"], d["cumulativeBits"], d["compatibleCounts"]), start=1
    ):
        click.echo(f"round {i}: bound {bits:.2f} bits, cumulative {cum:.2f} bits, "
                   f"{count} compatible vectors")
    if d["saturated"]:
        click.echo(f"saturated after round {d['rMax']}")
    for c in d["anonymityClasses"]:
        click.echo(f"weight {c['weight']}: voters {c['voters']} (k={c['k']})")


@main.command()
@click.option("--n", default=4, show_default=True)
@click.option("--f", default=1, show_default=True)
@click.option("--data-dir", default=None, help="state directory (env COVOTE_DATA_DIR)")
@click.option("--listen", default=None, help="host:port (env COVOTE_LISTEN)")
def daemon(n, f, data_dir, listen):
    """Run the coordination daemon with an in-process voter fleet."""
    from .service import run_daemon

    run_daemon(n=n, f=f, data_dir=data_dir, listen=listen)


if __name__ == "__main__":
    main()
