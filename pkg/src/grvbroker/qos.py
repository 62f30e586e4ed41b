"""QoS attributes, raw measure vectors and merit normalization.

Every attribute carries its own bounds and polarity.  Raw values are clamped
into the bounds and mapped onto ``[0, omega]`` so that the preferred extreme
of the attribute always scores ``omega``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Tuple

from .errors import (
    DegenerateBounds,
    LengthMismatch,
    NonPositiveOmega,
    NonPositiveWeight,
    WeightSumViolation,
)

WEIGHT_SUM_TOL = 1e-9

QosVector = Tuple[float, ...]


class Polarity(str, Enum):
    BIG_POSITIVE = "big_positive"
    SMALL_POSITIVE = "small_positive"


def _check_spec(name: str, lower: float, upper: float, weight: float) -> None:
    if not (upper > lower):
        raise DegenerateBounds(f"attribute {name!r}: upper {upper} must exceed lower {lower}")
    if not (weight > 0):
        raise NonPositiveWeight(f"attribute {name!r}: weight must be positive, got {weight}")


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    polarity: Polarity
    lower: float
    upper: float
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "polarity", Polarity(self.polarity))
        object.__setattr__(self, "lower", float(self.lower))
        object.__setattr__(self, "upper", float(self.upper))
        object.__setattr__(self, "weight", float(self.weight))
        _check_spec(self.name, self.lower, self.upper, self.weight)

    def clamp(self, value: float) -> float:
        return min(max(value, self.lower), self.upper)


@dataclass(frozen=True)
class AttributeSet:
    """Ordered attribute specs plus the global scaling factor ``omega``.

    The weights must sum to the number of attributes, so uniform weighting
    means every weight is 1.
    """

    specs: Tuple[AttributeSpec, ...]
    omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        object.__setattr__(self, "omega", float(self.omega))
        validate_attribute_set(self)

    @property
    def m(self) -> int:
        return len(self.specs)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.specs)

    @property
    def weights(self) -> Tuple[float, ...]:
        return tuple(s.weight for s in self.specs)

    def best_vector(self) -> QosVector:
        return tuple(s.upper if s.polarity is Polarity.BIG_POSITIVE else s.lower for s in self.specs)

    def worst_vector(self) -> QosVector:
        return tuple(s.lower if s.polarity is Polarity.BIG_POSITIVE else s.upper for s in self.specs)

    def subset(self, m: int) -> "AttributeSet":
        """First ``m`` attributes, reweighted uniformly so the weight sum stays valid."""
        if not 1 <= m <= self.m:
            raise ValueError(f"m must be in [1, {self.m}], got {m}")
        specs = [
            AttributeSpec(s.name, s.polarity, s.lower, s.upper, 1.0) for s in self.specs[:m]
        ]
        return AttributeSet(tuple(specs), self.omega)


def validate_attribute_set(aset: AttributeSet) -> AttributeSet:
    """Check every invariant of an attribute set; raise on the first violation."""
    if len(aset.specs) < 1:
        raise LengthMismatch("an attribute set needs at least one attribute")
    for s in aset.specs:
        _check_spec(s.name, s.lower, s.upper, s.weight)
    if not (aset.omega > 0):
        raise NonPositiveOmega(f"omega must be positive, got {aset.omega}")
    total = math.fsum(s.weight for s in aset.specs)
    if abs(total - len(aset.specs)) > WEIGHT_SUM_TOL:
        raise WeightSumViolation(
            f"weights sum to {total!r}, expected {len(aset.specs)} (one per attribute)"
        )
    return aset


def normalize(value: float, spec: AttributeSpec, omega: float) -> float:
    v = spec.clamp(float(value))
    span = spec.upper - spec.lower
    if spec.polarity is Polarity.BIG_POSITIVE:
        return omega * (v - spec.lower) / span
    return omega * (spec.upper - v) / span


def as_vector(values: Iterable[float], m: int) -> QosVector:
    vec = tuple(float(v) for v in values)
    if len(vec) != m:
        raise LengthMismatch(f"expected {m} values, got {len(vec)}")
    for v in vec:
        if not math.isfinite(v):
            raise ValueError(f"QoS values must be finite, got {v}")
    return vec


def normalize_vector(values: Sequence[float], aset: AttributeSet) -> QosVector:
    vec = as_vector(values, aset.m)
    return tuple(normalize(v, s, aset.omega) for v, s in zip(vec, aset.specs))


def weighted_sum(normalized: Sequence[float], aset: AttributeSet) -> float:
    """Weighted merit total of an already normalized vector."""
    if len(normalized) != aset.m:
        raise LengthMismatch(f"expected {aset.m} values, got {len(normalized)}")
    return math.fsum(s.weight * q for s, q in zip(aset.specs, normalized))


def merit(values: Sequence[float], aset: AttributeSet) -> float:
    return weighted_sum(normalize_vector(values, aset), aset)
