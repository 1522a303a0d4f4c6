import { z } from "zod";

import {
  AuditStatus,
  DelegationSet,
  ElectionStatus,
  LogEntry,
  PendingElection,
  TrustEdge,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`daemon returned ${status}: ${detail}`);
  }
}

/** The daemon refused a second ballot for the same election. */
export class VoteConflictError extends ApiError {}

async function fail(res: Response): Promise<never> {
  let detail = res.statusText;
  try {
    const body = (await res.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body: keep the status text
  }
  if (res.status === 409) throw new VoteConflictError(res.status, detail);
  throw new ApiError(res.status, detail);
}

export class DaemonClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async get<T>(path: string, schema: z.ZodType<T>): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path);
    if (!res.ok) await fail(res);
    return schema.parse(await res.json());
  }

  private async send<T>(
    method: string,
    path: string,
    body: unknown,
    schema: z.ZodType<T>,
  ): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) await fail(res);
    return schema.parse(await res.json());
  }

  pendingFor(voterId: number): Promise<PendingElection[]> {
    return this.get(`/elections?pending=${voterId}`, z.array(PendingElection));
  }

  status(electionId: string): Promise<ElectionStatus> {
    return this.get(`/elections/${electionId}`, ElectionStatus);
  }

  issue(command: string, opts: { issuer?: string; emergency?: boolean } = {}) {
    return this.send(
      "POST",
      "/elections",
      { issuer: opts.issuer ?? "default", command, emergency: opts.emergency ?? false },
      z.object({ electionId: z.string() }),
    );
  }

  /** Throws VoteConflictError when a ballot was already cast. */
  castVote(electionId: string, voterId: number, vote: 0 | 1) {
    return this.send(
      "POST",
      `/elections/${electionId}/vote`,
      { voterId, vote },
      z.object({ accepted: z.boolean() }),
    );
  }

  delegations(voterId: number): Promise<DelegationSet> {
    return this.get(`/delegations/${voterId}`, DelegationSet);
  }

  setDelegations(voterId: number, edges: TrustEdge[]): Promise<DelegationSet> {
    return this.send("PUT", `/delegations/${voterId}`, { edges }, DelegationSet);
  }

  startAudit(opId: string) {
    return this.send("POST", "/audits", { opId }, z.object({ auditId: z.string() }));
  }

  auditStatus(auditId: string): Promise<AuditStatus> {
    return this.get(`/audits/${auditId}`, AuditStatus);
  }

  log(params: { after?: number; election?: string; kind?: string } = {}): Promise<LogEntry[]> {
    const q = new URLSearchParams();
    if (params.after !== undefined) q.set("after", String(params.after));
    if (params.election !== undefined) q.set("election", params.election);
    if (params.kind !== undefined) q.set("kind", params.kind);
    const qs = q.toString();
    return this.get(`/log${qs ? "?" + qs : ""}`, z.array(LogEntry));
  }
}
