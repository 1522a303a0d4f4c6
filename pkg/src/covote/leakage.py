"""Worst-case vote disclosure analysis for deployments where partial
tallies are observable in the clear.

An observer sees, per election round, the reconstructed tally (and usually
the accepted weight sum). Each observation restricts the set of vote
vectors that could have produced it; the log-cardinality of that set is
the exact leakage in bits under independent uniform votes. The accepted
set S is unknown to the observer up to |S| in [n-f, n], so compatibility
quantifies existentially over S: the adversary's worst case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

MAX_EXHAUSTIVE_N = 20


@dataclass(frozen=True)
class ObservationRound:
    """One observed tally: T = sum of w_i * v_i over the accepted set."""

    tally: int
    weights: dict[int, int]
    weight_sum: Optional[int] = None  # accepted weight sum, when observed

    def validate(self) -> None:
        total = sum(self.weights.values())
        if not 0 <= self.tally <= total:
            raise ValueError("tally must lie in [0, total weight]")
        if self.weight_sum is not None and not 0 <= self.weight_sum <= total:
            raise ValueError("weight sum must lie in [0, total weight]")


@dataclass
class LeakageReport:
    per_round_bits: list[float]
    cumulative_bits: list[float]
    compatible_counts: list[int]
    saturated: bool
    r_max: Optional[int]
    anonymity_classes: list[dict]
    n: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "perRoundBits": self.per_round_bits,
            "cumulativeBits": self.cumulative_bits,
            "compatibleCounts": self.compatible_counts,
            "saturated": self.saturated,
            "rMax": self.r_max,
            "anonymityClasses": self.anonymity_classes,
        }


def _round_compatible(vector, rnd: ObservationRound, f: int) -> bool:
    """Does some accepted set S with at most f exclusions explain the round?

    Dynamic program over voters; state = (excluded count, weight in S,
    tally contribution of S).
    """
    ids = sorted(rnd.weights)
    states = {(0, 0, 0)}
    for pos, i in enumerate(ids):
        w = rnd.weights[i]
        v = vector[pos]
        nxt = set()
        for excl, sw, st in states:
            nxt.add((excl, sw + w, st + w * v))  # i in S
            if excl < f:
                nxt.add((excl + 1, sw, st))  # i excluded
        states = nxt
    for _, sw, st in states:
        if st != rnd.tally:
            continue
        if rnd.weight_sum is not None and sw != rnd.weight_sum:
            continue
        return True
    return False


def enumerate_compatible(
    rounds: list[ObservationRound], n: int, f: int
) -> set[tuple[int, ...]]:
    """All vote vectors in {0,1}^n that could have produced every observed
    round for some admissible accepted set."""
    if n > MAX_EXHAUSTIVE_N:
        raise ValueError(
            f"exhaustive enumeration is limited to n <= {MAX_EXHAUSTIVE_N}; "
            "larger systems need a sampling analysis"
        )
    for rnd in rounds:
        rnd.validate()
        if len(rnd.weights) != n:
            raise ValueError("round weights must cover all n voters")
    out = set()
    for vector in product((0, 1), repeat=n):
        if all(_round_compatible(vector, rnd, f) for rnd in rounds):
            out.add(vector)
    return out


def achievable_tallies(weights: dict[int, int]) -> set[int]:
    """All tally values any (vote vector, accepted set) pair can produce:
    the subset sums of the weights."""
    sums = {0}
    for w in weights.values():
        sums |= {s + w for s in sums}
    return sums


def anonymity_classify(weights: dict[int, int]) -> list[dict]:
    """Partition voters by weight; a class of size k gives its members
    k-anonymity under any tally observation."""
    by_weight: dict[int, list[int]] = {}
    for voter, w in sorted(weights.items()):
        by_weight.setdefault(w, []).append(voter)
    return [
        {"weight": w, "voters": voters, "k": len(voters)}
        for w, voters in sorted(by_weight.items())
    ]


def leakage_bound(
    rounds: list[ObservationRound], n: int, f: int
) -> LeakageReport:
    """Per-round information bound log2|achievable tallies| and the exact
    cumulative leakage n - log2|compatible set| after each round."""
    per_round = [math.log2(len(achievable_tallies(r.weights))) for r in rounds]
    cumulative = []
    counts = []
    for r in range(1, len(rounds) + 1):
        compat = enumerate_compatible(rounds[:r], n, f)
        if not compat:
            raise ValueError("observations are mutually inconsistent")
        counts.append(len(compat))
        cumulative.append(n - math.log2(len(compat)))
    saturated = False
    r_max = None
    if counts:
        final = counts[-1]
        for r, c in enumerate(counts, start=1):
            if c == final:
                r_max = r
                break
        saturated = r_max is not None and r_max < len(counts)
    classes = anonymity_classify(rounds[0].weights) if rounds else []
    return LeakageReport(
        per_round_bits=per_round,
        cumulative_bits=cumulative,
        compatible_counts=counts,
        saturated=saturated,
        r_max=r_max,
        anonymity_classes=classes,
        n=n,
    )
