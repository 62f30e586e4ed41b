"""Provider selection for content requests.

Four policies share one state object per broker lane:

* naive: best qualified provider, rotating down the candidate list while
  requests arrive within the resilience window;
* fair: smallest allocation ``z = Pr(P|Req) * Prov(P) / sum(Prov)``;
* round robin and uniform random baselines over the same candidates.

Selection functions mutate the :class:`SelectionState` in place and return a
:class:`Selection` record.
"""
from __future__ import annotations

import logging
import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import (
    AllZero,
    EmptyList,
    EmptyRoster,
    NonPositiveUserGrv,
    UnknownClass,
    UnqualifiedProvider,
)
from .grv import GrvParams, grv_request
from .qos import AttributeSet, QosVector, as_vector, merit
from .ranking import ProviderRecord, RankTable

log = logging.getLogger(__name__)

ALGORITHMS = ("naive", "fair", "round_robin", "random")


@dataclass(frozen=True)
class RequestSpec:
    content_key: str
    requirement: Optional[QosVector] = None
    user_class: Optional[int] = None
    arrival_time: float = 0.0

    def __post_init__(self):
        if (self.requirement is None) == (self.user_class is None):
            raise ValueError("a request carries either an explicit requirement or a user class")
        if self.requirement is not None:
            object.__setattr__(self, "requirement", tuple(float(v) for v in self.requirement))


@dataclass(frozen=True)
class UserClassTable:
    """Minimum GRV per user class, class 1 being the least privileged."""

    grv_min: Tuple[float, ...]
    classes: Tuple[QosVector, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "grv_min", tuple(float(g) for g in self.grv_min))
        object.__setattr__(self, "classes", tuple(tuple(c) for c in self.classes))
        if not self.grv_min:
            raise ValueError("at least one user class is required")
        if self.classes and len(self.classes) != len(self.grv_min):
            raise ValueError("class requirement vectors and minimum GRVs differ in length")
        if any(b < a for a, b in zip(self.grv_min, self.grv_min[1:])):
            raise ValueError(f"class minimum GRVs must be nondecreasing: {self.grv_min}")

    @classmethod
    def from_requirements(
        cls, vectors: Sequence[Sequence[float]], aset: AttributeSet, p: GrvParams
    ) -> "UserClassTable":
        vecs = tuple(as_vector(v, aset.m) for v in vectors)
        return cls(tuple(grv_request(merit(v, aset), p) for v in vecs), vecs)

    @property
    def k(self) -> int:
        return len(self.grv_min)

    def threshold(self, user_class: int) -> float:
        if not 1 <= user_class <= self.k:
            raise UnknownClass(f"user class {user_class} not in 1..{self.k}")
        return self.grv_min[user_class - 1]

    def fair_thresholds(self, req_grv: float) -> List[float]:
        """Thresholds of the classes a request can be counted under.

        These are the classes whose minimum is at least the request's GRV.  When
        no class sits exactly at the request's level (explicit requirements),
        the request's own level is added as the base class.
        """
        above = [g for g in self.grv_min if g >= req_grv]
        if not above or above[0] > req_grv:
            above.insert(0, req_grv)
        return above


def request_grv(
    req: RequestSpec, classes: Optional[UserClassTable], aset: AttributeSet, p: GrvParams
) -> float:
    if req.requirement is not None:
        return grv_request(merit(req.requirement, aset), p)
    if classes is None:
        raise UnknownClass(f"user class {req.user_class} requested but no class table configured")
    return classes.threshold(req.user_class)


def qualified_candidates(
    table: RankTable, req_grv: float, excluded: Iterable[str] = ()
) -> List[ProviderRecord]:
    excluded = set(excluded)
    # table entries are already in descending GRV order
    return [r for r in table.entries if r.grv >= req_grv and r.id not in excluded]


@dataclass(frozen=True)
class Selection:
    provider_id: str
    grv: float
    fallback: bool = False
    z: Optional[float] = None
    jain: float = 1.0


@dataclass
class SelectionState:
    rng_seed: int = 0
    t_last: Optional[float] = None
    cursor: int = 0
    rr_cursor: int = 0
    epoch: Optional[int] = None
    prov_counts: Dict[str, int] = field(default_factory=dict)
    served: Dict[str, int] = field(default_factory=dict)
    fairness_history: List[float] = field(default_factory=list)
    notifications: int = 0
    naive_ids: Tuple[str, ...] = ()
    rng: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = random.Random(self.rng_seed)

    def sync_epoch(self, table: RankTable) -> None:
        if table.epoch != self.epoch:
            self.epoch = table.epoch
            self.prov_counts.clear()

    def record(self, provider_id: str, pool: Sequence[str]) -> float:
        self.prov_counts[provider_id] = self.prov_counts.get(provider_id, 0) + 1
        self.served[provider_id] = self.served.get(provider_id, 0) + 1
        jain = jain_index([self.served.get(pid, 0) for pid in pool])
        self.fairness_history.append(jain)
        return jain


def _fallback(state: SelectionState, table: RankTable) -> Selection:
    top = table.top()
    if top is None:
        raise EmptyRoster("no providers registered")
    state.notifications += 1
    log.info("no qualified provider; notifying client and routing to rank 1 (%s)", top.id)
    jain = state.record(top.id, [top.id])
    return Selection(top.id, top.grv, fallback=True, jain=jain)


def select_naive(
    candidates: Sequence[ProviderRecord],
    state: SelectionState,
    now: float,
    p: GrvParams,
    table: RankTable,
    req_grv: float,
) -> Selection:
    if not len(table):
        raise EmptyRoster("no providers registered")
    state.sync_epoch(table)
    if not candidates:
        state.t_last = now
        return _fallback(state, table)
    ids = tuple(c.id for c in candidates)
    if ids != state.naive_ids:
        state.naive_ids = ids
        state.cursor = 0
    if state.t_last is None or now - state.t_last > p.t_res:
        state.cursor = 0
    else:
        j = state.cursor + 1
        if j < len(candidates) and candidates[j].grv >= req_grv:
            state.cursor = j
        else:
            state.cursor = 0
    state.t_last = now
    chosen = candidates[state.cursor]
    return Selection(chosen.id, chosen.grv, jain=state.record(chosen.id, ids))


def _probabilities(phi: Mapping[object, Set[str]], n_qualified: int) -> Dict[str, float]:
    share: Dict[str, float] = {}
    for members in phi.values():
        if members:
            inv = 1.0 / len(members)
            for pid in members:
                share[pid] = share.get(pid, 0.0) + inv
    return {pid: s / n_qualified for pid, s in share.items()}


def selection_probability(
    provider: str, phi: Mapping[object, Set[str]], req_grv: float, table: RankTable
) -> float:
    """Probability that ``provider`` serves a request of GRV ``req_grv``.

    ``phi`` maps each class the request may be counted under to the set of
    providers able to serve that class.
    """
    if table.grv_of(provider) < req_grv:
        raise UnqualifiedProvider(f"{provider} is below the request GRV {req_grv}")
    n_qualified = sum(1 for r in table.entries if r.grv >= req_grv)
    return _probabilities(phi, n_qualified).get(provider, 0.0)


def allocation(provider: str, pr: float, prov_counts: Mapping[str, int]) -> float:
    total = sum(prov_counts.values())
    if total == 0:
        return 0.0
    return pr * prov_counts.get(provider, 0) / total


def select_fair(
    req_grv: float,
    table: RankTable,
    classes: Optional[UserClassTable],
    state: SelectionState,
    excluded: Iterable[str] = (),
) -> Selection:
    if not len(table):
        raise EmptyRoster("no providers registered")
    state.sync_epoch(table)
    excluded = set(excluded)
    pool = qualified_candidates(table, req_grv, excluded)
    if not pool:
        return _fallback(state, table)
    thresholds = classes.fair_thresholds(req_grv) if classes is not None else [req_grv]
    phi = {
        j: {r.id for r in pool if r.grv >= t} for j, t in enumerate(thresholds)
    }
    n_qualified = sum(1 for r in table.entries if r.grv >= req_grv)
    pr = _probabilities(phi, n_qualified)
    z = {r.id: allocation(r.id, pr.get(r.id, 0.0), state.prov_counts) for r in pool}
    chosen = min(pool, key=lambda r: (z[r.id], -r.grv, r.id))
    jain = state.record(chosen.id, [r.id for r in pool])
    return Selection(chosen.id, chosen.grv, z=z[chosen.id], jain=jain)


def select_round_robin(
    candidates: Sequence[ProviderRecord], state: SelectionState, table: RankTable
) -> Selection:
    state.sync_epoch(table)
    if not candidates:
        return _fallback(state, table)
    if state.rr_cursor >= len(candidates):
        state.rr_cursor = 0
    chosen = candidates[state.rr_cursor]
    state.rr_cursor = (state.rr_cursor + 1) % len(candidates)
    return Selection(chosen.id, chosen.grv, jain=state.record(chosen.id, [c.id for c in candidates]))


def select_random(
    candidates: Sequence[ProviderRecord], state: SelectionState, table: RankTable
) -> Selection:
    state.sync_epoch(table)
    if not candidates:
        return _fallback(state, table)
    chosen = candidates[state.rng.randrange(len(candidates))]
    return Selection(chosen.id, chosen.grv, jain=state.record(chosen.id, [c.id for c in candidates]))


def jain_index(allocations: Sequence[float]) -> float:
    """Jain fairness of an allocation vector, 1.0 meaning perfectly even."""
    z = [float(a) for a in allocations]
    if not z:
        raise EmptyList("jain index of an empty allocation")
    if any(a < 0 for a in z):
        raise ValueError("allocations must be nonnegative")
    sq = math.fsum(a * a for a in z)
    if sq == 0:
        raise AllZero("all allocations are zero")
    return math.fsum(z) ** 2 / (len(z) * sq)


def estimated_reliability(selected_grvs: Sequence[float], grv_u: float) -> float:
    """Estimated reliability in percent: mean excess over ``grv_u`` times the spread."""
    if not selected_grvs:
        raise EmptyList("no selections")
    if not grv_u > 0:
        raise NonPositiveUserGrv(f"user GRV must be positive, got {grv_u}")
    mean = statistics.fmean(selected_grvs)
    sigma = statistics.stdev(selected_grvs) if len(selected_grvs) > 1 else 0.0
    return 100.0 * (mean - grv_u) * sigma / grv_u
