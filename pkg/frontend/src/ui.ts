import { frontierPercent } from "./emergency";
import {
  AuditStatus,
  Ballot,
  ElectionStatus,
  PendingElection,
} from "./types";

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderPendingList(pending: PendingElection[]): string {
  if (pending.length === 0) {
    return '<p class="empty">No ballots waiting.</p>';
  }
  const items = pending.map((p) => {
    const badge =
      p.mode === "EMERGENCY"
        ? `<span class="badge emergency">EMERGENCY · early verdict at ` +
          `${frontierPercent(p.threshold)} of weight</span>`
        : "";
    return (
      `<li class="pending" data-election="${esc(p.electionId)}">` +
      `<code>${esc(p.command)}</code> ${badge}` +
      `<span class="meta">issuer ${esc(p.issuer)} · threshold ${esc(p.threshold)}</span>` +
      `<button data-vote="1" data-election="${esc(p.electionId)}">Approve</button>` +
      `<button data-vote="0" data-election="${esc(p.electionId)}">Reject</button>` +
      `</li>`
    );
  });
  return `<ul class="pending-list">${items.join("")}</ul>`;
}

export function renderBallot(b: Ballot, conflicted: boolean): string {
  const verdict = b.vote === 1 ? "approve" : "reject";
  const verified = b.verified
    ? '<span class="badge verified">receipt verified</span>'
    : '<span class="badge unverified">unverified</span>';
  const conflict = conflicted
    ? '<span class="badge conflict">double vote refused</span>'
    : "";
  return (
    `<li class="ballot" data-election="${esc(b.electionId)}">` +
    `<code>${esc(b.electionId)}</code> ${verdict} ${verified}${conflict}</li>`
  );
}

export function renderBallotHistory(
  ballots: Ballot[],
  conflicts: Set<string>,
): string {
  if (ballots.length === 0) return '<p class="empty">No votes cast yet.</p>';
  const items = ballots.map((b) => renderBallot(b, conflicts.has(b.electionId)));
  return `<ul class="ballot-list">${items.join("")}</ul>`;
}

export function renderElection(s: ElectionStatus): string {
  const head = `<h2><code>${esc(s.command)}</code></h2>`;
  if (!s.decision) {
    return `${head}<p class="status pending">Voting in progress…</p>`;
  }
  const verdict = s.decision.approved ? "APPROVED" : "REJECTED";
  const exec = s.execution
    ? `<pre class="exec">${esc(s.execution.output)}</pre>`
    : "";
  return (
    head +
    `<p class="status decided ${verdict.toLowerCase()}">${verdict} ` +
    `(${s.decision.mode}) — tally ${s.decision.tally} of ${s.decision.weightSum}</p>` +
    exec
  );
}

export function renderAudit(a: AuditStatus): string {
  if (!a.complete) return '<p class="status pending">Audit vote in progress…</p>';
  if (a.approved === false) {
    return '<p class="status refused">Audit refused by the voters.</p>';
  }
  const rows = Object.entries(a.revealed)
    .sort(([x], [y]) => Number(x) - Number(y))
    .map(
      ([voter, vote]) =>
        `<tr><td>voter ${esc(voter)}</td><td>${vote === 1 ? "approve" : "reject"}</td></tr>`,
    );
  return `<table class="audit"><tbody>${rows.join("")}</tbody></table>`;
}
