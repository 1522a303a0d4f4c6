"""Shared-seed common coin."""

import pytest

from covote.coin import SharedSeedCoin
from covote.transport import InstanceTag


def test_deterministic_per_instance_round():
    a = SharedSeedCoin(b"seed")
    b = SharedSeedCoin(b"seed")
    tag = InstanceTag("e1", "aba", 3)
    for r in range(1, 20):
        assert a.flip(tag, r) == b.flip(tag, r)


def test_varies_across_rounds_and_instances():
    coin = SharedSeedCoin(b"seed")
    tag = InstanceTag("e1", "aba", 3)
    flips = [coin.flip(tag, r) for r in range(1, 200)]
    assert set(flips) == {0, 1}
    other = [coin.flip(InstanceTag("e1", "aba", 4), r) for r in range(1, 200)]
    assert flips != other


def test_seed_matters():
    tag = InstanceTag("e", "aba", 1)
    a = [SharedSeedCoin(b"a").flip(tag, r) for r in range(1, 100)]
    b = [SharedSeedCoin(b"b").flip(tag, r) for r in range(1, 100)]
    assert a != b


def test_roughly_balanced():
    coin = SharedSeedCoin(b"balance")
    flips = [
        coin.flip(InstanceTag("e", "aba", o), r)
        for o in range(1, 11)
        for r in range(1, 101)
    ]
    ones = sum(flips)
    assert 400 < ones < 600


def test_rounds_start_at_one():
    with pytest.raises(ValueError):
        SharedSeedCoin(b"s").flip(InstanceTag("e", "aba", 1), 0)
