import { DaemonClient, VoteConflictError } from "./api";
import { Ballot } from "./types";

/** Local record of this voter's cast ballots, one per election, with
 * verification against the daemon's share-receipt log. */
export class BallotBook {
  private readonly byElection = new Map<string, Ballot>();
  readonly conflicts = new Set<string>();

  constructor(
    private readonly client: DaemonClient,
    private readonly voterId: number,
  ) {}

  list(): Ballot[] {
    return [...this.byElection.values()].sort((a, b) => a.castAt - b.castAt);
  }

  get(electionId: string): Ballot | undefined {
    return this.byElection.get(electionId);
  }

  /** Cast a vote and record the ballot. A daemon-side double-vote refusal
   * is recorded as a visible conflict and re-thrown. */
  async cast(electionId: string, vote: 0 | 1): Promise<Ballot> {
    if (this.byElection.has(electionId)) {
      this.conflicts.add(electionId);
      throw new VoteConflictError(409, "ballot already recorded locally");
    }
    try {
      await this.client.castVote(electionId, this.voterId, vote);
    } catch (err) {
      if (err instanceof VoteConflictError) this.conflicts.add(electionId);
      throw err;
    }
    const ballot: Ballot = {
      electionId,
      voterId: this.voterId,
      vote,
      castAt: Date.now(),
      verified: false,
    };
    this.byElection.set(electionId, ballot);
    return ballot;
  }

  /** Confirm against the daemon log that our ballot's share dealing was
   * received: exactly one self share receipt for this voter. */
  async verify(electionId: string): Promise<boolean> {
    const ballot = this.byElection.get(electionId);
    if (!ballot) return false;
    const entries = await this.client.log({
      election: electionId,
      kind: "SHARE_RECEIPT",
    });
    const own = entries.filter(
      (e) => e.payload.voter === this.voterId && e.payload.origin === this.voterId,
    );
    ballot.verified = own.length === 1;
    return ballot.verified;
  }
}
