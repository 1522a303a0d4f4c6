"""Pluggable common coin for the binary agreement rounds.

Default is a shared-seed PRF coin: the seed is distributed at election
start (trusted setup), so every process derives the same unpredictable-to-
the-scheduler bit per (instance, round). A threshold coin can be dropped in
behind the same interface.
"""

from __future__ import annotations

import hashlib
from typing import Protocol

from .transport import InstanceTag


class CommonCoin(Protocol):
    def flip(self, tag: InstanceTag, round_no: int) -> int: ...


class SharedSeedCoin:
    def __init__(self, seed: bytes):
        self.seed = seed

    def flip(self, tag: InstanceTag, round_no: int) -> int:
        if round_no < 1:
            raise ValueError("rounds are numbered from 1")
        material = b"|".join(
            [
                b"covote/coin/v1",
                self.seed,
                tag.election.encode(),
                tag.kind.encode(),
                str(tag.origin).encode(),
                str(round_no).encode(),
            ]
        )
        return hashlib.sha256(material).digest()[0] & 1
