"""Request routing across one or more selection lanes.

A lane is one selection algorithm with its own :class:`SelectionState`.  All
lanes read the same published :class:`RankTable`; publishing a new table is a
single reference swap, so a routing decision never mixes two epochs.
"""
from __future__ import annotations

import csv
import zlib
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

from .errors import NotFound
from .grv import GrvParams
from .index import ContentIndex
from .qos import AttributeSet
from .ranking import RankTable
from .selection import (
    ALGORITHMS,
    RequestSpec,
    SelectionState,
    UserClassTable,
    qualified_candidates,
    request_grv,
    select_fair,
    select_naive,
    select_random,
    select_round_robin,
)

TRACE_CSV_FIELDS = (
    "request_seq",
    "arrival_time",
    "algorithm",
    "req_grv",
    "selected_provider",
    "selected_grv",
    "fallback_flag",
    "z_value",
    "jain_index_after",
)


@dataclass(frozen=True)
class Outcome:
    request_seq: int
    arrival_time: float
    algorithm: str
    req_grv: float
    selected_provider: str
    selected_grv: float
    fallback: bool
    z: Optional[float]
    jain: float

    def csv_row(self) -> dict:
        return {
            "request_seq": self.request_seq,
            "arrival_time": f"{self.arrival_time:.6f}",
            "algorithm": self.algorithm,
            "req_grv": f"{self.req_grv:.6f}",
            "selected_provider": self.selected_provider,
            "selected_grv": f"{self.selected_grv:.6f}",
            "fallback_flag": int(self.fallback),
            "z_value": "" if self.z is None else f"{self.z:.6f}",
            "jain_index_after": f"{self.jain:.6f}",
        }

    @classmethod
    def from_csv_row(cls, row: dict) -> "Outcome":
        return cls(
            request_seq=int(row["request_seq"]),
            arrival_time=float(row["arrival_time"]),
            algorithm=row["algorithm"],
            req_grv=float(row["req_grv"]),
            selected_provider=row["selected_provider"],
            selected_grv=float(row["selected_grv"]),
            fallback=row["fallback_flag"].strip() == "1",
            z=float(row["z_value"]) if row["z_value"] else None,
            jain=float(row["jain_index_after"]),
        )


def write_trace_csv(outcomes: Sequence[Outcome], stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=TRACE_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(o.csv_row() for o in outcomes)


def read_trace_csv(stream):
    return [Outcome.from_csv_row(row) for row in csv.DictReader(stream)]


def lane_seed(seed: int, algorithm: str) -> int:
    return (seed * 1_000_003 + zlib.crc32(algorithm.encode())) & 0xFFFFFFFF


class Broker:
    def __init__(
        self,
        aset: AttributeSet,
        params: GrvParams,
        table: RankTable,
        index: ContentIndex,
        classes: Optional[UserClassTable] = None,
        algorithms: Sequence[str] = ALGORITHMS,
        seed: int = 0,
    ):
        unknown = set(algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        self.aset = aset
        self.params = params
        self.index = index
        self.classes = classes
        self.algorithms = tuple(algorithms)
        self.states: Dict[str, SelectionState] = {
            a: SelectionState(rng_seed=lane_seed(seed, a)) for a in self.algorithms
        }
        self._table = table
        self.internal_served = 0
        self.not_found = 0

    @property
    def table(self) -> RankTable:
        return self._table

    def publish(self, table: RankTable) -> None:
        self._table = table

    def route(self, req: RequestSpec, seq: int, now: float) -> Dict[str, Outcome]:
        """Route one request through every lane.

        Returns an empty mapping for internal content.  Unknown content raises
        :class:`NotFound`.
        """
        try:
            entry = self.index.lookup(req.content_key)
        except NotFound:
            self.not_found += 1
            raise
        if entry.internal:
            self.internal_served += 1
            return {}
        table = self._table
        rg = request_grv(req, self.classes, self.aset, self.params)
        candidates = qualified_candidates(table, rg, entry.excluded_providers)
        out = {}
        for alg in self.algorithms:
            state = self.states[alg]
            if alg == "naive":
                sel = select_naive(candidates, state, now, self.params, table, rg)
            elif alg == "fair":
                sel = select_fair(rg, table, self.classes, state, entry.excluded_providers)
            elif alg == "round_robin":
                sel = select_round_robin(candidates, state, table)
            else:
                sel = select_random(candidates, state, table)
            out[alg] = Outcome(seq, now, alg, rg, sel.provider_id, sel.grv, sel.fallback, sel.z, sel.jain)
        return out
