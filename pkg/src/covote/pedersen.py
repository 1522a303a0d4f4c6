"""Pedersen commitments, vector commitments over polynomial coefficients,
and share-vs-commitment verification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .groups import Element, Group


def commit(group: Group, x: int, r: int) -> Element:
    """C = g^x * h^r. Information-theoretically hiding, computationally binding."""
    return group.mul(group.pow(group.g, x), group.pow(group.h, r))


def commit_combine(group: Group, a: Element, b: Element) -> Element:
    """Homomorphic combination: commit(x,r) * commit(y,s) = commit(x+y, r+s)."""
    return group.mul(a, b)


@dataclass(frozen=True)
class VectorCommitment:
    """One commitment per joint (vote, blinding) polynomial coefficient pair.

    coeff_commits[0] commits to the shared secret itself; length equals the
    reconstruction threshold k.
    """

    coeff_commits: tuple  # tuple[Element, ...]

    def __len__(self) -> int:
        return len(self.coeff_commits)

    def encode(self, group: Group) -> bytes:
        return b"".join(group.encode_element(c) for c in self.coeff_commits)

    @classmethod
    def decode(cls, group: Group, data: bytes) -> "VectorCommitment":
        w = group.element_width
        if len(data) == 0 or len(data) % w:
            raise ValueError("bad vector commitment length")
        return cls(
            tuple(group.decode_element(data[i : i + w]) for i in range(0, len(data), w))
        )


def commit_coefficients(
    group: Group, vote_coeffs: Sequence[int], blinding_coeffs: Sequence[int]
) -> VectorCommitment:
    if len(vote_coeffs) != len(blinding_coeffs):
        raise ValueError("coefficient lists must have equal length")
    return VectorCommitment(
        tuple(commit(group, f, b) for f, b in zip(vote_coeffs, blinding_coeffs))
    )


def commit_weighted_combine(
    group: Group, items: Sequence[tuple[VectorCommitment, int]]
) -> VectorCommitment:
    """Coefficientwise product of each commitment raised to its integer weight."""
    if not items:
        raise ValueError("nothing to combine")
    length = len(items[0][0])
    if any(len(vc) != length for vc, _ in items):
        raise ValueError("vector commitment length mismatch")
    out = []
    for j in range(length):
        acc = group.identity
        for vc, w in items:
            acc = group.mul(acc, group.pow(vc.coeff_commits[j], w))
        out.append(acc)
    return VectorCommitment(tuple(out))


def commitment_at_index(group: Group, vc: VectorCommitment, index: int) -> Element:
    """Homomorphic evaluation: product of coeff_commits[j]^(index^j), which
    equals commit(f(index), b(index)) for the committed polynomials."""
    acc = group.identity
    power = 1
    for c in vc.coeff_commits:
        acc = group.mul(acc, group.pow(c, power))
        power = power * index % group.q
    return acc


def verify_share_against_commitment(
    group: Group, index: int, vote_share: int, blinding_share: int, vc: VectorCommitment
) -> bool:
    if index < 1:
        raise ValueError("index must be >= 1")
    return commit(group, vote_share, blinding_share) == commitment_at_index(
        group, vc, index
    )
