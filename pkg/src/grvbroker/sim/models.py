"""Synthetic provider behaviour: seeded random-walk drift plus load degradation."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from ..qos import AttributeSet, Polarity, QosVector


@dataclass
class ProviderModel:
    """QoS generator for one simulated provider.

    ``drift`` is the per-sample random-walk step (standard deviation) and
    ``load_penalty`` the degradation per in-flight request, both per attribute
    and in attribute units.  Degradation always moves a value toward the
    attribute's worse extreme.
    """

    id: str
    attributes: AttributeSet
    base_qos: QosVector
    drift: Optional[Sequence[float]] = None
    load_penalty: Optional[Sequence[float]] = None
    noise_seed: int = 0
    _walk: List[float] = field(init=False, repr=False)
    _rng: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        m = self.attributes.m
        self.base_qos = tuple(float(v) for v in self.base_qos)
        if len(self.base_qos) != m:
            raise ValueError(f"provider {self.id}: base vector has {len(self.base_qos)} values, expected {m}")
        self.drift = tuple(self.drift) if self.drift is not None else (0.0,) * m
        self.load_penalty = tuple(self.load_penalty) if self.load_penalty is not None else (0.0,) * m
        if len(self.drift) != m or len(self.load_penalty) != m:
            raise ValueError(f"provider {self.id}: drift/load_penalty need {m} values")
        if any(d < 0 for d in self.drift) or any(lp < 0 for lp in self.load_penalty):
            raise ValueError(f"provider {self.id}: drift and load_penalty must be nonnegative")
        self._walk = [0.0] * m
        self._rng = random.Random(self.noise_seed)


def provider_sample(model: ProviderModel, now: float, in_flight: float = 0) -> QosVector:
    """Advance the model's walk by one step and return the observed QoS vector."""
    out = []
    for j, spec in enumerate(model.attributes.specs):
        base = model.base_qos[j]
        if model.drift[j] > 0:
            # walk is held inside the bounds so it can always come back
            w = model._walk[j] + model._rng.gauss(0.0, model.drift[j])
            model._walk[j] = min(max(w, spec.lower - base), spec.upper - base)
        penalty = model.load_penalty[j] * in_flight
        if spec.polarity is Polarity.SMALL_POSITIVE:
            penalty = -penalty
        out.append(spec.clamp(base + model._walk[j] - penalty))
    return tuple(out)
