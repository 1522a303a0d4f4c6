"""Trust-graph vote delegation with a super-voter cap.

A timed-out voter's ballot falls to the first admissible delegate found by
walking outgoing trust edges in descending trust weight (ties broken by
ascending voter id), chaining transitively through delegates that are
themselves timed out, and skipping any delegate whose effective weight
would exceed maxWeight * total weight.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .config import ElectionConfig, TrustEdge


def delegate_resolve(
    edges: list[TrustEdge],
    voter: int,
    effective_weights: dict[int, int],
    max_weight: Fraction,
    timed_out: set[int],
    delegated_weight: Optional[int] = None,
) -> Optional[int]:
    """First admissible delegate for `voter`, or None when the vote simply
    stays missing. `effective_weights` reflects delegations already applied."""
    if voter not in timed_out:
        raise ValueError("only timed-out voters delegate")
    if delegated_weight is None:
        delegated_weight = effective_weights.get(voter, 0)
    total = sum(effective_weights.values())
    cap = Fraction(max_weight) * total
    outgoing: dict[int, list[TrustEdge]] = {}
    for e in edges:
        outgoing.setdefault(e.src, []).append(e)

    visited = {voter}
    frontier = [voter]
    while frontier:
        current = frontier.pop(0)
        for edge in sorted(outgoing.get(current, []), key=lambda e: (-e.trust, e.dst)):
            d = edge.dst
            if d in visited:
                continue
            visited.add(d)
            if d in timed_out:
                frontier.append(d)  # chain through, transitively
                continue
            if effective_weights.get(d, 0) + delegated_weight <= cap:
                return d
            # over the cap: skip this delegate, keep searching
    return None


def resolve_delegations(
    config: ElectionConfig, timed_out: set[int]
) -> tuple[dict[int, int], dict[int, Optional[int]]]:
    """Apply delegation for every timed-out voter, in ascending voter id.

    Returns the adjusted per-voter weights (timed-out voters drop to zero,
    delegates absorb the weight) and the delegate assignment map."""
    weights = dict(config.weights)
    assignment: dict[int, Optional[int]] = {}
    for voter in sorted(timed_out):
        w = weights.get(voter, 0)
        delegate = delegate_resolve(
            config.delegation, voter, weights, config.max_weight, timed_out, w
        )
        assignment[voter] = delegate
        if delegate is not None:
            weights[delegate] += w
        weights[voter] = 0
    return weights, assignment
