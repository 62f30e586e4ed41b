"""Broker content index keyed by SHA-256 digests of content names."""
from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, Optional

from .errors import EmptyName, NotFound, UnknownExcludedProvider

INDEX_CSV_FIELDS = ("key", "name", "internal", "excluded_providers")


def content_key(name: str) -> str:
    if not name:
        raise EmptyName("content name must be nonempty")
    return hashlib.sha256(name.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ContentEntry:
    key: str
    name: str
    internal: bool = False
    excluded_providers: FrozenSet[str] = frozenset()


@dataclass
class ContentIndex:
    entries: Dict[str, ContentEntry] = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    def __iter__(self) -> Iterator[ContentEntry]:
        return iter(self.entries.values())

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def lookup(self, key: str) -> ContentEntry:
        try:
            return self.entries[key]
        except KeyError:
            raise NotFound(key) from None

    def upsert(
        self,
        name: str,
        internal: bool = False,
        excluded: Iterable[str] = (),
        roster: Optional[Iterable[str]] = None,
    ) -> str:
        """Create or replace the entry for ``name`` and return its key.

        When ``roster`` is given, every excluded id must belong to it.
        """
        key = content_key(name)
        excluded = frozenset(excluded)
        if roster is not None:
            unknown = excluded - set(roster)
            if unknown:
                raise UnknownExcludedProvider(f"excluded providers not in roster: {sorted(unknown)}")
        self.entries[key] = ContentEntry(key, name, bool(internal), excluded)
        return key

    def write_csv(self, stream) -> None:
        writer = csv.DictWriter(stream, fieldnames=INDEX_CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for e in self.entries.values():
            writer.writerow(
                {
                    "key": e.key,
                    "name": e.name,
                    "internal": int(e.internal),
                    "excluded_providers": ";".join(sorted(e.excluded_providers)),
                }
            )

    @classmethod
    def read_csv(cls, stream, roster: Optional[Iterable[str]] = None) -> "ContentIndex":
        index = cls()
        for row in csv.DictReader(stream):
            excluded = [p for p in row["excluded_providers"].split(";") if p]
            key = index.upsert(row["name"], row["internal"].strip() == "1", excluded, roster)
            if row.get("key") and row["key"] != key:
                raise ValueError(f"key for {row['name']!r} does not match its SHA-256 digest")
        return index
