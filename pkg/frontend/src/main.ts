import { DaemonClient, VoteConflictError } from "./api";
import { BallotBook } from "./ballots";
import { PendingPoller } from "./poller";
import { renderBallotHistory, renderPendingList } from "./ui";

/** Browser bootstrap: wire the poller, ballot book, and vote buttons into
 * #pending and #history containers. */
export function mount(root: Document, daemonUrl: string, voterId: number): () => void {
  const client = new DaemonClient(daemonUrl);
  const book = new BallotBook(client, voterId);
  const pendingEl = root.getElementById("pending");
  const historyEl = root.getElementById("history");
  if (!pendingEl || !historyEl) {
    throw new Error("expected #pending and #history containers");
  }

  const refreshHistory = () => {
    historyEl.innerHTML = renderBallotHistory(book.list(), book.conflicts);
  };

  const poller = new PendingPoller(client, voterId, {
    onChange: (pending) => {
      pendingEl.innerHTML = renderPendingList(pending);
    },
    onError: (err) => console.error("poll failed:", err),
  });

  pendingEl.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const electionId = target.dataset.election;
    const vote = target.dataset.vote;
    if (!electionId || vote === undefined) return;
    void book
      .cast(electionId, Number(vote) === 1 ? 1 : 0)
      .then(() => book.verify(electionId))
      .catch((err) => {
        if (!(err instanceof VoteConflictError)) console.error(err);
      })
      .finally(refreshHistory);
  });

  poller.start();
  refreshHistory();
  return () => poller.stop();
}
