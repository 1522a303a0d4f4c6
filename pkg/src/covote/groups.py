"""Prime-order group abstraction with two independent generators.

Two instantiations share one interface: a small subgroup of the integers
mod 167 (order 83) that brute-force test oracles can exhaust, and a
production elliptic group (secp256k1, ~2^256 order) whose generators are
hash-derived so no party knows their discrete-log relation.
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from typing import Any

Element = Any  # opaque; interpreted only by the owning Group


class Group(ABC):
    """A cyclic group of prime order q with independent generators g, h."""

    name: str
    q: int
    g: Element
    h: Element
    identity: Element
    element_width: int  # bytes of one encoded element

    @property
    def scalar_width(self) -> int:
        return (self.q.bit_length() + 7) // 8

    @abstractmethod
    def mul(self, a: Element, b: Element) -> Element: ...

    @abstractmethod
    def pow(self, base: Element, exp: int) -> Element: ...

    @abstractmethod
    def inv(self, a: Element) -> Element: ...

    @abstractmethod
    def encode_element(self, a: Element) -> bytes: ...

    @abstractmethod
    def decode_element(self, data: bytes) -> Element: ...

    def div(self, a: Element, b: Element) -> Element:
        return self.mul(a, self.inv(b))

    def random_scalar(self, rng) -> int:
        return rng.randrange(self.q)

    def encode_scalar(self, s: int) -> bytes:
        # canonical wire form: little-endian, fixed width
        if not 0 <= s < self.q:
            raise ValueError(f"scalar {s} out of range [0, {self.q})")
        return s.to_bytes(self.scalar_width, "little")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != self.scalar_width:
            raise ValueError("bad scalar length")
        s = int.from_bytes(data, "little")
        if s >= self.q:
            raise ValueError("scalar not reduced")
        return s


class ModPGroup(Group):
    """Order-q subgroup of the multiplicative group mod p, with q | p-1."""

    def __init__(self, p: int, q: int, g: int, h: int, name: str = "modp"):
        if (p - 1) % q:
            raise ValueError("q must divide p-1")
        for gen in (g, h):
            if gen in (0, 1) or pow(gen, q, p) != 1:
                raise ValueError(f"{gen} is not an order-{q} element")
        if g == h:
            raise ValueError("generators must be distinct")
        self.p, self.q, self.g, self.h = p, q, g, h
        self.name = name
        self.identity = 1
        self.element_width = (p.bit_length() + 7) // 8

    def mul(self, a, b):
        return a * b % self.p

    def pow(self, base, exp):
        return pow(base, exp % self.q, self.p)

    def inv(self, a):
        return pow(a, -1, self.p)

    def encode_element(self, a):
        return a.to_bytes(self.element_width, "big")

    def decode_element(self, data):
        if len(data) != self.element_width:
            raise ValueError("bad element length")
        a = int.from_bytes(data, "big")
        if not 0 < a < self.p or pow(a, self.q, self.p) != 1:
            raise ValueError("not a subgroup element")
        return a


# secp256k1 parameters
_EC_P = 2**256 - 2**32 - 977
_EC_N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
_EC_B = 7


class Secp256k1Group(Group):
    """secp256k1 as a generic prime-order group; points in affine coords,
    identity is None. Generators are derived by hashing a domain tag to a
    curve x-coordinate (try-and-increment), so their mutual discrete log
    is unknown."""

    def __init__(self):
        self.name = "secp256k1"
        self.q = _EC_N
        self.identity = None
        self.element_width = 33
        self.g = self._hash_to_point(b"covote/generator/g/v1")
        self.h = self._hash_to_point(b"covote/generator/h/v1")

    @staticmethod
    def _on_curve(x: int, y: int) -> bool:
        return (y * y - x * x * x - _EC_B) % _EC_P == 0

    def _hash_to_point(self, tag: bytes):
        ctr = 0
        while True:
            x = int.from_bytes(
                hashlib.sha256(tag + ctr.to_bytes(4, "big")).digest(), "big"
            ) % _EC_P
            rhs = (x * x * x + _EC_B) % _EC_P
            y = pow(rhs, (_EC_P + 1) // 4, _EC_P)  # p = 3 mod 4
            if y * y % _EC_P == rhs:
                if y % 2:
                    y = _EC_P - y
                return (x, y)
            ctr += 1

    def mul(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        x1, y1 = a
        x2, y2 = b
        if x1 == x2:
            if (y1 + y2) % _EC_P == 0:
                return None
            lam = (3 * x1 * x1) * pow(2 * y1, -1, _EC_P) % _EC_P
        else:
            lam = (y2 - y1) * pow(x2 - x1, -1, _EC_P) % _EC_P
        x3 = (lam * lam - x1 - x2) % _EC_P
        y3 = (lam * (x1 - x3) - y1) % _EC_P
        return (x3, y3)

    def pow(self, base, exp):
        exp %= self.q
        result = None
        addend = base
        while exp:
            if exp & 1:
                result = self.mul(result, addend)
            addend = self.mul(addend, addend)
            exp >>= 1
        return result

    def inv(self, a):
        if a is None:
            return None
        x, y = a
        return (x, (-y) % _EC_P)

    def encode_element(self, a):
        if a is None:
            return b"\x00" * 33
        x, y = a
        return bytes([2 + (y & 1)]) + x.to_bytes(32, "big")

    def decode_element(self, data):
        if len(data) != 33:
            raise ValueError("bad element length")
        if data == b"\x00" * 33:
            return None
        prefix, x = data[0], int.from_bytes(data[1:], "big")
        if prefix not in (2, 3) or x >= _EC_P:
            raise ValueError("bad point encoding")
        rhs = (x * x * x + _EC_B) % _EC_P
        y = pow(rhs, (_EC_P + 1) // 4, _EC_P)
        if y * y % _EC_P != rhs:
            raise ValueError("x not on curve")
        if (y & 1) != (prefix & 1):
            y = _EC_P - y
        return (x, y)


# Small group for exhaustive desk-scale oracles: squares mod 167, order 83.
TEST_GROUP = ModPGroup(p=167, q=83, g=4, h=9, name="modp167")

_production: Group | None = None


def production_group() -> Group:
    global _production
    if _production is None:
        _production = Secp256k1Group()
    return _production


def group_by_name(name: str) -> Group:
    if name == TEST_GROUP.name:
        return TEST_GROUP
    if name == "secp256k1":
        return production_group()
    raise ValueError(f"unknown group {name!r}")
