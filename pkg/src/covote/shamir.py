"""Shamir secret sharing of (vote, blinding) pairs with homomorphic
share combination and Lagrange reconstruction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .groups import Group
from .pedersen import VectorCommitment, commit_coefficients


@dataclass(frozen=True)
class Share:
    """Evaluation point (index, f(index), b(index)) of the joint vote and
    blinding polynomials."""

    index: int
    vote_share: int
    blinding_share: int

    def encode(self, group: Group) -> bytes:
        return (
            self.index.to_bytes(4, "little")
            + group.encode_scalar(self.vote_share)
            + group.encode_scalar(self.blinding_share)
        )

    @classmethod
    def decode(cls, group: Group, data: bytes) -> "Share":
        w = group.scalar_width
        if len(data) != 4 + 2 * w:
            raise ValueError("bad share length")
        return cls(
            index=int.from_bytes(data[:4], "little"),
            vote_share=group.decode_scalar(data[4 : 4 + w]),
            blinding_share=group.decode_scalar(data[4 + w :]),
        )


def eval_poly(coeffs: Sequence[int], x: int, q: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % q
    return acc


def share_polynomials(
    group: Group, vote_coeffs: Sequence[int], blinding_coeffs: Sequence[int], n: int
) -> tuple[list[Share], VectorCommitment]:
    """Deal shares for explicitly given polynomials (coefficient order:
    constant term first)."""
    q = group.q
    shares = [
        Share(i, eval_poly(vote_coeffs, i, q), eval_poly(blinding_coeffs, i, q))
        for i in range(1, n + 1)
    ]
    return shares, commit_coefficients(group, vote_coeffs, blinding_coeffs)


def shamir_share(
    group: Group, secret: int, blinding: int, k: int, n: int, rng
) -> tuple[list[Share], VectorCommitment]:
    """Sample random degree-(k-1) polynomials f, b with f(0)=secret,
    b(0)=blinding and deal share i = (i, f(i), b(i)) for i in 1..n."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k} n={n}")
    if n >= group.q:
        raise ValueError("party count must be below the field size")
    vote_coeffs = [secret % group.q] + [group.random_scalar(rng) for _ in range(k - 1)]
    blinding_coeffs = [blinding % group.q] + [
        group.random_scalar(rng) for _ in range(k - 1)
    ]
    return share_polynomials(group, vote_coeffs, blinding_coeffs, n)


def interpolate(group: Group, shares: Sequence[Share], k: int) -> tuple[int, int]:
    """Lagrange interpolation at X=0 of both share coordinates."""
    if len(shares) < k:
        raise ValueError(f"need at least {k} shares, got {len(shares)}")
    pts = sorted(shares, key=lambda s: s.index)[:k]
    indices = [s.index for s in pts]
    if len(set(indices)) != len(indices):
        raise ValueError("duplicate share indices")
    q = group.q
    vote = blinding = 0
    for s in pts:
        lam = 1
        for other in indices:
            if other != s.index:
                lam = lam * other % q * pow(other - s.index, -1, q) % q
        vote = (vote + lam * s.vote_share) % q
        blinding = (blinding + lam * s.blinding_share) % q
    return vote, blinding


def share_linear_combine(
    group: Group, terms: Sequence[tuple[Share, int]]
) -> Share:
    """Componentwise sum of weight*share at one fixed index; interpolating
    combined shares yields the same linear combination of secrets."""
    if not terms:
        raise ValueError("nothing to combine")
    index = terms[0][0].index
    if any(s.index != index for s, _ in terms):
        raise ValueError("shares must have matching indices")
    q = group.q
    vote = sum(s.vote_share * w for s, w in terms) % q
    blinding = sum(s.blinding_share * w for s, w in terms) % q
    return Share(index, vote, blinding)
