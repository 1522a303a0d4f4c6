import { TrustEdge } from "./types";

export interface Fractionish {
  num: number;
  den: number;
}

/** Parse "1/2", "3/5" or "1" into an exact fraction. */
export function parseFraction(s: string): Fractionish {
  const m = /^\s*(\d+)\s*(?:\/\s*(\d+)\s*)?$/.exec(s);
  if (!m || !m[1]) throw new Error(`not a fraction: ${s}`);
  const num = Number(m[1]);
  const den = m[2] ? Number(m[2]) : 1;
  if (den === 0) throw new Error("zero denominator");
  return { num, den };
}

export interface DelegationCheck {
  ok: boolean;
  errors: string[];
}

/** Client-side mirror of the daemon's delegation validation: edge shape,
 * range, self-delegation, and the per-voter weight cap. The daemon
 * re-checks everything; this exists to block bad edits before submission. */
export function validateEdges(
  voterId: number,
  edges: TrustEdge[],
  weights: Record<string, number>,
  maxWeight: Fractionish,
): DelegationCheck {
  const errors: string[] = [];
  const n = Object.keys(weights).length;
  const total = Object.values(weights).reduce((a, b) => a + b, 0);
  const seen = new Set<number>();
  for (const [dst, trust] of edges) {
    if (!Number.isInteger(dst) || dst < 1 || dst > n) {
      errors.push(`delegate ${dst} is not a voter (1..${n})`);
      continue;
    }
    if (dst === voterId) {
      errors.push("cannot delegate to yourself");
      continue;
    }
    if (!Number.isInteger(trust) || trust <= 0) {
      errors.push(`trust for delegate ${dst} must be a positive integer`);
      continue;
    }
    if (seen.has(dst)) {
      errors.push(`duplicate edge to delegate ${dst}`);
      continue;
    }
    seen.add(dst);
    // cap: the delegate's combined weight may not exceed maxWeight * total
    const combined = (weights[String(dst)] ?? 0) + (weights[String(voterId)] ?? 0);
    if (combined * maxWeight.den > maxWeight.num * total) {
      errors.push(
        `delegating to voter ${dst} would give them ${combined} of ${total} ` +
          `weight, over the ${maxWeight.num}/${maxWeight.den} cap`,
      );
    }
  }
  return { ok: errors.length === 0, errors };
}
