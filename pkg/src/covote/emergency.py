"""Dual-threshold rule for emergency elections.

The early evaluation frontier t_e = 1 - (1-t)/2 marks when enough weight
has arrived that the outcome may already be forced regardless of the
remaining votes. Denominators use the total eligible weight; the normal
and LATE paths use the accepted weight sum instead.
"""

from __future__ import annotations

import enum
from fractions import Fraction


class EarlyOutcome(enum.Enum):
    APPROVE_EARLY = "APPROVE_EARLY"
    REJECT_EARLY = "REJECT_EARLY"
    UNDECIDED = "UNDECIDED"


def emergency_threshold(t: Fraction) -> Fraction:
    if not 0 < t <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    return 1 - (1 - Fraction(t)) / 2


def emergency_evaluate(
    partial_yes: int, arrived_weight: int, total_weight: int, t: Fraction
) -> EarlyOutcome:
    t = Fraction(t)
    if arrived_weight < emergency_threshold(t) * total_weight:
        raise ValueError("early evaluation frontier not reached")
    if partial_yes >= t * total_weight:
        # approval holds even if every remaining vote is negative
        return EarlyOutcome.APPROVE_EARLY
    if partial_yes + (total_weight - arrived_weight) < t * total_weight:
        # rejection holds even if every remaining vote is positive
        return EarlyOutcome.REJECT_EARLY
    return EarlyOutcome.UNDECIDED
