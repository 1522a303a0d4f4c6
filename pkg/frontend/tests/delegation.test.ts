import { beforeEach, describe, expect, it } from "vitest";

import { ApiError, DaemonClient } from "../src/api";
import { parseFraction, validateEdges } from "../src/delegation";
import { MockDaemon } from "./mock-daemon";

const uniform = { "1": 1, "2": 1, "3": 1, "4": 1 };

describe("parseFraction", () => {
  it("parses plain and slashed forms", () => {
    expect(parseFraction("1/2")).toEqual({ num: 1, den: 2 });
    expect(parseFraction("1")).toEqual({ num: 1, den: 1 });
    expect(() => parseFraction("x")).toThrow();
    expect(() => parseFraction("1/0")).toThrow();
  });
});

describe("validateEdges", () => {
  it("accepts an in-range edge under a permissive cap", () => {
    const check = validateEdges(1, [[2, 5]], uniform, parseFraction("1"));
    expect(check).toEqual({ ok: true, errors: [] });
  });

  it("rejects self-delegation, bad range, and non-positive trust", () => {
    const check = validateEdges(
      1,
      [[1, 5], [9, 5], [2, 0]],
      uniform,
      parseFraction("1"),
    );
    expect(check.ok).toBe(false);
    expect(check.errors).toHaveLength(3);
  });

  it("blocks an edit that would push the delegate over the weight cap", () => {
    // combined weight 2 of 4 breaches a 1/4 cap
    const check = validateEdges(1, [[2, 5]], uniform, parseFraction("1/4"));
    expect(check.ok).toBe(false);
    expect(check.errors[0]).toContain("cap");
    // exactly at a 1/2 cap is allowed
    expect(validateEdges(1, [[2, 5]], uniform, parseFraction("1/2")).ok).toBe(true);
  });
});

describe("server-side enforcement", () => {
  let daemon: MockDaemon;
  let client: DaemonClient;

  beforeEach(() => {
    daemon = new MockDaemon();
    client = new DaemonClient("http://mock", daemon.fetch);
  });

  it("round-trips edges through the daemon", async () => {
    const saved = await client.setDelegations(1, [[2, 5], [3, 1]]);
    expect(saved.edges).toEqual([[2, 5], [3, 1]]);
    expect((await client.delegations(1)).edges).toEqual([[2, 5], [3, 1]]);
  });

  it("surfaces the daemon's cap refusal as an error", async () => {
    daemon.rejectDelegations = true;
    await expect(client.setDelegations(1, [[2, 5]])).rejects.toBeInstanceOf(ApiError);
    expect((await client.delegations(1)).edges).toEqual([]);
  });
});
