import { Fractionish, parseFraction } from "./delegation";

/** The weight frontier at which an emergency election may settle early:
 * 1 - (1 - t) / 2, over the total eligible weight. */
export function earlyFrontier(threshold: Fractionish): Fractionish {
  const { num, den } = threshold;
  // 1 - (den - num) / (2 den) = (den + num) / (2 den)
  return { num: den + num, den: 2 * den };
}

export function frontierPercent(thresholdStr: string): string {
  const f = earlyFrontier(parseFraction(thresholdStr));
  return `${((100 * f.num) / f.den).toFixed(0)}%`;
}
