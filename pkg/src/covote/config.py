"""Election configuration: weights, threshold, delegation graph, caps."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


@dataclass(frozen=True)
class TrustEdge:
    src: int
    dst: int
    trust: int


@dataclass
class ElectionConfig:
    weights: dict[int, int]
    threshold: Fraction
    delegation: list[TrustEdge] = field(default_factory=list)
    max_weight: Fraction = Fraction(1)
    timeout: float = 300.0

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())

    def validate(self, field_order: int | None = None) -> None:
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be non-negative")
        if self.total_weight <= 0:
            raise ValueError("total weight must be positive")
        if not 0 < self.threshold <= 1:
            raise ValueError("threshold must lie in (0, 1]")
        if not 0 < self.max_weight <= 1:
            raise ValueError("maxWeight must lie in (0, 1]")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        for e in self.delegation:
            if e.src == e.dst:
                raise ValueError("delegation self-edges are not allowed")
            if e.src not in self.weights or e.dst not in self.weights:
                raise ValueError("delegation edge references unknown voter")
        if field_order is not None and self.total_weight >= field_order:
            # the tally lives in Z_q and must not wrap
            raise ValueError("total weight must be below the field order")

    @staticmethod
    def from_dict(data: dict) -> "ElectionConfig":
        return ElectionConfig(
            weights={int(k): int(v) for k, v in data["weights"].items()},
            threshold=Fraction(str(data["threshold"])),
            delegation=[
                TrustEdge(int(s), int(d), int(t))
                for s, d, t in data.get("delegation", [])
            ],
            max_weight=Fraction(str(data.get("maxWeight", 1))),
            timeout=float(data.get("timeout", 300.0)),
        )

    def to_dict(self) -> dict:
        return {
            "weights": {str(k): v for k, v in self.weights.items()},
            "threshold": str(self.threshold),
            "delegation": [[e.src, e.dst, e.trust] for e in self.delegation],
            "maxWeight": str(self.max_weight),
            "timeout": self.timeout,
        }
