"""Provider roster: bootstrap ranking, periodic reranking, join and leave.

A :class:`RankTable` is an immutable snapshot.  Every operation here returns
a new table; readers holding an older snapshot are never affected.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    DuplicateProvider,
    EmptyProviderList,
    MeasurementFailure,
    MissingProviderMeasures,
    UnknownProvider,
)
from .grv import EpochMeasures, GrvParams, grv_provider, pad_series
from .qos import AttributeSet, merit

log = logging.getLogger(__name__)

RANK_CSV_FIELDS = ("epoch", "provider_id", "grv", "rank", "prov_count")


@dataclass(frozen=True)
class ProviderRecord:
    id: str
    grv: float
    rank: int = 0
    gateway: str = ""
    prov_count: int = 0


def _order_key(rec: ProviderRecord):
    return (-rec.grv, rec.id)


@dataclass(frozen=True)
class RankTable:
    epoch: int
    created_at: float
    entries: Tuple[ProviderRecord, ...]

    @classmethod
    def build(cls, epoch: int, created_at: float, records: Iterable[ProviderRecord]) -> "RankTable":
        """Sort by descending GRV (ties by ascending id) and assign ranks 1..N."""
        ordered = sorted(records, key=_order_key)
        entries = tuple(replace(r, rank=i) for i, r in enumerate(ordered, start=1))
        return cls(epoch, created_at, entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, provider_id) -> bool:
        return any(r.id == provider_id for r in self.entries)

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(r.id for r in self.entries)

    def get(self, provider_id: str) -> ProviderRecord:
        for r in self.entries:
            if r.id == provider_id:
                return r
        raise UnknownProvider(provider_id)

    def grv_of(self, provider_id: str) -> float:
        return self.get(provider_id).grv

    def top(self) -> Optional[ProviderRecord]:
        return self.entries[0] if self.entries else None

    def with_counts(self, counts: Mapping[str, int]) -> "RankTable":
        entries = tuple(replace(r, prov_count=int(counts.get(r.id, 0))) for r in self.entries)
        return RankTable(self.epoch, self.created_at, entries)

    def csv_rows(self) -> List[dict]:
        return [
            {
                "epoch": self.epoch,
                "provider_id": r.id,
                "grv": f"{r.grv:.6f}",
                "rank": r.rank,
                "prov_count": r.prov_count,
            }
            for r in self.entries
        ]


def write_rank_csv(tables: Sequence[RankTable], stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=RANK_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for t in tables:
        writer.writerows(t.csv_rows())


def rank_csv_text(tables: Sequence[RankTable]) -> str:
    buf = io.StringIO()
    write_rank_csv(tables, buf)
    return buf.getvalue()


def read_rank_csv(stream) -> List[RankTable]:
    """Parse rank rows back into tables; ``created_at`` is not serialized and reads as 0."""
    by_epoch: Dict[int, List[ProviderRecord]] = {}
    for row in csv.DictReader(stream):
        epoch = int(row["epoch"])
        by_epoch.setdefault(epoch, []).append(
            ProviderRecord(
                id=row["provider_id"],
                grv=float(row["grv"]),
                rank=int(row["rank"]),
                prov_count=int(row["prov_count"]),
            )
        )
    tables = []
    for epoch in sorted(by_epoch):
        entries = tuple(sorted(by_epoch[epoch], key=lambda r: r.rank))
        tables.append(RankTable(epoch, 0.0, entries))
    return tables


Measure = Callable[[str, str], Sequence[float]]


def initialize_ranks(
    providers: Sequence[str],
    samples: Sequence[str],
    measure: Measure,
    aset: AttributeSet,
    p: GrvParams,
    created_at: float = 0.0,
    gateways: Optional[Mapping[str, str]] = None,
) -> RankTable:
    """Bootstrap ranking: request every sample content from every provider.

    ``measure(provider, content)`` returns the raw QoS vector observed for one
    delivery.  A provider whose measurement raises :class:`MeasurementFailure`
    is kept with an all-zero series.
    """
    if not providers:
        raise EmptyProviderList("cannot rank an empty roster")
    if not samples:
        raise ValueError("at least one sample content is required")
    if len(set(samples)) != len(samples):
        raise ValueError("sample contents must be distinct")
    if len(set(providers)) != len(providers):
        raise DuplicateProvider("duplicate provider ids in roster")
    gateways = gateways or {}
    records = []
    for pid in providers:
        try:
            series = [merit(measure(pid, content), aset) for content in samples]
        except MeasurementFailure as exc:
            log.warning("%s; recording worst-case series", exc)
            series = [0.0] * p.c_bp
        em = EpochMeasures(pid, pad_series(series, p.c_bp))
        records.append(ProviderRecord(pid, grv_provider(em, p), gateway=gateways.get(pid, "")))
    return RankTable.build(0, created_at, records)


def rerank(
    epoch_measures: Iterable[EpochMeasures],
    prev: RankTable,
    p: GrvParams,
    created_at: float = 0.0,
) -> RankTable:
    """Publish the next epoch's table from the measures gathered in this one.

    Partial series are left-padded to ``c_bp`` entries.  Every provider in
    ``prev`` must have at least one measure.
    """
    by_id: Dict[str, EpochMeasures] = {}
    for em in epoch_measures:
        if em.provider_id not in prev:
            raise UnknownProvider(em.provider_id)
        by_id[em.provider_id] = em
    missing = [r.id for r in prev if r.id not in by_id or not by_id[r.id].series]
    if missing:
        raise MissingProviderMeasures(f"no measures for {missing}")
    records = [
        ProviderRecord(r.id, grv_provider(by_id[r.id].padded(p.c_bp), p), gateway=r.gateway)
        for r in prev
    ]
    return RankTable.build(prev.epoch + 1, created_at, records)


def join(
    table: RankTable,
    new_provider: str,
    bootstrap: EpochMeasures,
    p: GrvParams,
    gateway: str = "",
) -> RankTable:
    if new_provider in table:
        raise DuplicateProvider(new_provider)
    grv = grv_provider(EpochMeasures(new_provider, bootstrap.series).padded(p.c_bp), p)
    records = list(table.entries) + [ProviderRecord(new_provider, grv, gateway=gateway)]
    return RankTable.build(table.epoch, table.created_at, records)


def leave(table: RankTable, provider: str) -> RankTable:
    if provider not in table:
        raise UnknownProvider(provider)
    records = [r for r in table.entries if r.id != provider]
    return RankTable.build(table.epoch, table.created_at, records)
