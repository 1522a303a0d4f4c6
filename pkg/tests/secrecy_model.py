"""Algebraic model of everything a curious daemon plus up to f corrupted
voters observe during one election, used to verify vote secrecy exactly.

The model is deliberately conservative: the adversary is handed the
discrete log relation between the two commitment bases (theta with
h = g^theta), so every Pedersen commitment collapses to the known scalar
x + theta * r. A real adversary knows strictly less. Proof transcripts are
omitted: the OR-proof is honest-verifier zero knowledge, its responses are
fresh uniform masks independent of the witness.

Per dealing voter j the secret state is the vote polynomial
f_j = v_j + a_j X and blinding polynomial b_j = r_j + c_j X. Observables:

- commitment scalars E0_j = v_j + theta r_j and E1_j = a_j + theta c_j
  (public via reliable broadcast),
- the corrupted voters' received shares f_j(i), b_j(i) for i in C,
- the daemon's partial tallies P_i = sum_{j in A} w_j f_j(i) and
  B_i = sum_{j in A} w_j b_j(i) for every reporting index i.

Second-layer recovery sub-shares are excluded: with at most f corrupted
voters the adversary holds fewer than the threshold number of points of
each fresh sub-polynomial, which is information-theoretically nothing.

All arithmetic is over Z_q. Solution counting uses exact Gaussian
elimination, cross-checked against brute-force enumeration in a tiny field
by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product


@dataclass(frozen=True)
class VoterSecrets:
    vote: int
    a: int  # vote polynomial linear coefficient
    r: int  # blinding
    c: int  # blinding polynomial linear coefficient


def observe(
    q: int,
    theta: int,
    weights: dict[int, int],
    secrets: dict[int, VoterSecrets],
    accepted: list[int],
    corrupted: set[int],
) -> tuple:
    """The adversary's full view of one election, as a hashable tuple."""
    voters = sorted(secrets)
    view = []
    for j in voters:
        s = secrets[j]
        view.append((s.vote + theta * s.r) % q)  # E0_j
        view.append((s.a + theta * s.c) % q)  # E1_j
        for i in sorted(corrupted):
            view.append((s.vote + s.a * i) % q)  # f_j(i)
            view.append((s.r + s.c * i) % q)  # b_j(i)
    for i in voters:
        p = sum(weights[j] * (secrets[j].vote + secrets[j].a * i) for j in accepted)
        b = sum(weights[j] * (secrets[j].r + secrets[j].c * i) for j in accepted)
        view.append(p % q)  # P_i
        view.append(b % q)  # B_i
    return tuple(view)


def _solve_affine(q: int, rows: list[list[int]]) -> tuple[bool, int]:
    """Gaussian elimination of [A | b] over Z_q (q prime); returns
    (consistent, nullity of A)."""
    rows = [[x % q for x in row] for row in rows]
    if not rows:
        return True, 0
    cols = len(rows[0]) - 1
    rank = 0
    for col in range(cols):
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, q)
        rows[rank] = [(x * inv) % q for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [
                    (a - factor * b) % q for a, b in zip(rows[r], rows[rank])
                ]
        rank += 1
        if rank == len(rows):
            break
    for row in rows[rank:]:
        if row[-1] % q:
            return False, 0
    return True, cols - rank


def count_explanations(
    q: int,
    theta: int,
    weights: dict[int, int],
    view: tuple,
    accepted: list[int],
    corrupted: set[int],
    corrupted_secrets: dict[int, VoterSecrets],
    candidate_votes: dict[int, int],
) -> int:
    """Number of honest secret-state assignments producing exactly `view`
    when the honest votes are `candidate_votes`. Zero means incompatible;
    secrecy holds when the count is identical for all candidate vectors
    with the observed weighted tally."""
    voters = sorted(set(weights))
    honest = [j for j in voters if j not in corrupted]
    # unknown layout: per honest j the triple (a_j, r_j, c_j)
    idx = {}
    for pos, j in enumerate(honest):
        idx[("a", j)] = 3 * pos
        idx[("r", j)] = 3 * pos + 1
        idx[("c", j)] = 3 * pos + 2
    ncols = 3 * len(honest)

    rows = []
    cursor = 0

    def eq(coeffs: dict, const_known: int, observed: int):
        row = [0] * (ncols + 1)
        for key, coef in coeffs.items():
            row[idx[key]] = coef % q
        row[-1] = (observed - const_known) % q
        rows.append(row)

    for j in voters:
        if j in corrupted:
            s = corrupted_secrets[j]
            assert view[cursor] == (s.vote + theta * s.r) % q
            assert view[cursor + 1] == (s.a + theta * s.c) % q
            cursor += 2
        else:
            v = candidate_votes[j]
            eq({("r", j): theta}, v, view[cursor])  # E0_j
            eq({("a", j): 1, ("c", j): theta}, 0, view[cursor + 1])  # E1_j
            cursor += 2
        for i in sorted(corrupted):
            if j in corrupted:
                cursor += 2
                continue
            v = candidate_votes[j]
            eq({("a", j): i}, v, view[cursor])  # f_j(i)
            eq({("r", j): 1, ("c", j): i}, 0, view[cursor + 1])  # b_j(i)
            cursor += 2
    for i in voters:
        coeffs_p: dict = {}
        coeffs_b: dict = {}
        const_p = const_b = 0
        for j in accepted:
            w = weights[j]
            if j in corrupted:
                s = corrupted_secrets[j]
                const_p += w * (s.vote + s.a * i)
                const_b += w * (s.r + s.c * i)
            else:
                const_p += w * candidate_votes[j]
                coeffs_p[("a", j)] = coeffs_p.get(("a", j), 0) + w * i
                coeffs_b[("r", j)] = coeffs_b.get(("r", j), 0) + w
                coeffs_b[("c", j)] = coeffs_b.get(("c", j), 0) + w * i
        eq(coeffs_p, const_p, view[cursor])
        eq(coeffs_b, const_b, view[cursor + 1])
        cursor += 2
    consistent, nullity = _solve_affine(q, rows)
    return q**nullity if consistent else 0


def secrecy_check(
    q: int,
    theta: int,
    weights: dict[int, int],
    accepted: list[int],
    corrupted: set[int],
    true_secrets: dict[int, VoterSecrets],
) -> dict:
    """Run the exact secrecy argument for one concrete world: the set of
    honest vote vectors consistent with the adversary's view must be
    exactly those matching the observed honest weighted tally, all with
    equal explanation counts."""
    view = observe(q, theta, weights, true_secrets, accepted, corrupted)
    honest = [j for j in sorted(weights) if j not in corrupted]
    honest_accepted = [j for j in accepted if j not in corrupted]
    true_tally = sum(weights[j] * true_secrets[j].vote for j in honest_accepted) % q
    corrupted_secrets = {j: true_secrets[j] for j in corrupted}
    counts = {}
    for votes in product((0, 1), repeat=len(honest)):
        candidate = dict(zip(honest, votes))
        counts[votes] = count_explanations(
            q, theta, weights, view, accepted, corrupted, corrupted_secrets, candidate
        )
    matching = {
        vs
        for vs in counts
        if sum(weights[j] * v for j, v in zip(honest, vs) if j in accepted) % q
        == true_tally
    }
    compatible = {vs for vs, c in counts.items() if c > 0}
    positive = {counts[vs] for vs in compatible}
    return {
        "counts": counts,
        "compatible": compatible,
        "matching": matching,
        "uniform": len(positive) == 1,
        "exact": compatible == matching,
    }
