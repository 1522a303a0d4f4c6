import { z } from "zod";

export const PendingElection = z.object({
  electionId: z.string(),
  issuer: z.string(),
  command: z.string(),
  weights: z.record(z.string(), z.number()),
  mode: z.enum(["NORMAL", "EMERGENCY"]),
  threshold: z.string(),
  timeout: z.number(),
});
export type PendingElection = z.infer<typeof PendingElection>;

export const Decision = z.object({
  approved: z.boolean(),
  tally: z.number(),
  weightSum: z.number(),
  mode: z.enum(["NORMAL", "EARLY", "LATE"]),
});
export type Decision = z.infer<typeof Decision>;

export const ElectionStatus = z.object({
  electionId: z.string(),
  issuer: z.string(),
  command: z.string(),
  emergency: z.boolean(),
  auditOf: z.string().nullable(),
  status: z.enum(["pending", "decided"]),
  effectiveWeights: z.record(z.string(), z.number()),
  decision: Decision.optional(),
  execution: z
    .object({ status: z.number(), output: z.string() })
    .nullable()
    .optional(),
});
export type ElectionStatus = z.infer<typeof ElectionStatus>;

export const AuditStatus = z.object({
  auditId: z.string(),
  opId: z.string(),
  approved: z.boolean().nullable(),
  complete: z.boolean(),
  revealed: z.record(z.string(), z.number()),
});
export type AuditStatus = z.infer<typeof AuditStatus>;

export const LogEntry = z.object({
  seq: z.number(),
  ts: z.number(),
  kind: z.enum([
    "REQUEST",
    "SHARE_RECEIPT",
    "PARTIAL_TALLY",
    "DECISION",
    "AUDIT",
  ]),
  election: z.string(),
  payload: z.record(z.string(), z.unknown()),
});
export type LogEntry = z.infer<typeof LogEntry>;

/** A trust edge [delegateId, trust]; higher trust wins first. */
export type TrustEdge = [number, number];

export const DelegationSet = z.object({
  voterId: z.number(),
  edges: z.array(z.tuple([z.number(), z.number()])),
});
export type DelegationSet = z.infer<typeof DelegationSet>;

/** A locally recorded cast vote, verifiable against the daemon log. */
export interface Ballot {
  electionId: string;
  voterId: number;
  vote: 0 | 1;
  castAt: number; // epoch millis
  verified: boolean; // daemon log carries our share receipt
}
