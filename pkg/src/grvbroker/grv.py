"""Global Rank Value computation.

A provider's GRV is the recency-weighted mean of its per-measurement merit
totals over one reranking epoch.  Older measurements are discounted through a
Gaussian-shaped irrelevance factor, never by more than half.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, List, Sequence, Tuple

from .errors import IndexOutOfEpoch, InvalidParams, OutOfRangeSum, SeriesLengthMismatch

RANGE_TOL = 1e-9


@dataclass(frozen=True)
class GrvParams:
    m: int = 1
    c_bp: int = 5
    c: float = 1.0
    x_max: float = 2.0
    omega: float = 1.0
    t_rerank: float = 10.0
    t_res: float = 0.5

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParams(f"m must be a positive integer, got {self.m}")
        if int(self.c_bp) != self.c_bp or self.c_bp < 1:
            raise InvalidParams(f"c_bp must be a positive integer, got {self.c_bp}")
        if not (0 < self.c <= 1):
            raise InvalidParams(f"c must lie in (0, 1], got {self.c}")
        if not (self.x_max > 0 and math.isfinite(self.x_max)):
            raise InvalidParams(f"x_max must be positive, got {self.x_max}")
        if not (self.omega > 0):
            raise InvalidParams(f"omega must be positive, got {self.omega}")
        if not (self.t_rerank > 0):
            raise InvalidParams(f"t_rerank must be positive, got {self.t_rerank}")
        if not (self.t_res > 0):
            raise InvalidParams(f"t_res must be positive, got {self.t_res}")

    @property
    def t_measure(self) -> float:
        return self.t_rerank / self.c_bp

    @property
    def max_sum(self) -> float:
        """Largest weighted merit total a single measurement can reach."""
        return self.m * self.omega

    def weights(self) -> Tuple[float, ...]:
        return _weights(self.c_bp, self.c, self.x_max)


def _irrelevance(k: int, c_bp: int, c: float, x_max: float) -> float:
    # k / c_bp is exactly 1.0 at k == c_bp, so the last factor is exactly zero
    x = (k / c_bp) * x_max
    return c * (math.exp(-(x * x) / 2.0) - math.exp(-(x_max * x_max) / 2.0))


@lru_cache(maxsize=256)
def _weights(c_bp: int, c: float, x_max: float) -> Tuple[float, ...]:
    return tuple(1.0 / (1.0 + _irrelevance(k, c_bp, c, x_max)) for k in range(1, c_bp + 1))


def _check_k(k: int, p: GrvParams) -> None:
    if not 1 <= k <= p.c_bp:
        raise IndexOutOfEpoch(f"k={k} outside 1..{p.c_bp}")


def irrelevance_factor(k: int, p: GrvParams) -> float:
    """M_k for the k-th measurement of an epoch (k = c_bp is the most recent)."""
    _check_k(k, p)
    return _irrelevance(k, p.c_bp, p.c, p.x_max)


def measure_weight(k: int, p: GrvParams) -> float:
    _check_k(k, p)
    return p.weights()[k - 1]


@dataclass(frozen=True)
class EpochMeasures:
    """Merit totals of one provider over an epoch, oldest first."""

    provider_id: Hashable
    series: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(float(v) for v in self.series))

    def padded(self, c_bp: int) -> "EpochMeasures":
        return EpochMeasures(self.provider_id, pad_series(self.series, c_bp))


def pad_series(series: Sequence[float], c_bp: int) -> Tuple[float, ...]:
    """Fit a series to ``c_bp`` entries.

    Short series are left-padded with their earliest value; long ones keep
    only the most recent ``c_bp`` values.
    """
    values = tuple(series)
    if not values:
        raise SeriesLengthMismatch("cannot pad an empty series")
    if len(values) >= c_bp:
        return values[len(values) - c_bp:]
    return (values[0],) * (c_bp - len(values)) + values


def _check_sum(value: float, p: GrvParams) -> None:
    if not (-RANGE_TOL <= value <= p.max_sum + RANGE_TOL):
        raise OutOfRangeSum(f"merit total {value} outside [0, {p.max_sum}]")


def grv_provider(em: EpochMeasures, p: GrvParams) -> float:
    if len(em.series) != p.c_bp:
        raise SeriesLengthMismatch(
            f"provider {em.provider_id!r}: {len(em.series)} measures, expected {p.c_bp}"
        )
    for v in em.series:
        _check_sum(v, p)
    total = math.fsum(w * v for w, v in zip(p.weights(), em.series))
    return total / (p.m * p.c_bp)


def grv_request(qsum: float, p: GrvParams) -> float:
    """GRV of a requirement whose merit total is held constant over the epoch."""
    _check_sum(qsum, p)
    return qsum * math.fsum(p.weights()) / (p.m * p.c_bp)


def grv_bounds(p: GrvParams) -> Tuple[float, float]:
    return 0.0, p.omega * math.fsum(p.weights()) / p.c_bp


def weight_table(c_bp_values: Iterable[int], c: float = 1.0, x_max: float = 2.0) -> List[dict]:
    """Per-epoch-length weight columns with their min, max and average step.

    The average step is ``(max - min) / c_bp``.
    """
    columns = []
    for c_bp in c_bp_values:
        p = GrvParams(c_bp=c_bp, c=c, x_max=x_max)
        w = p.weights()
        columns.append(
            {
                "c_bp": c_bp,
                "weights": w,
                "min": min(w),
                "max": max(w),
                "avg_diff": (max(w) - min(w)) / c_bp,
            }
        )
    return columns
