"""Loading provider rosters from a QWS-style web-service QoS dataset."""
from __future__ import annotations

import csv
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..errors import MalformedDataset, NoMatches
from ..qos import AttributeSet, AttributeSpec, Polarity, QosVector

log = logging.getLogger(__name__)

# (column, polarity, lower, upper); bounds cover the published QWS value ranges
QWS_COLUMNS = (
    ("response_time", Polarity.SMALL_POSITIVE, 0.0, 5000.0),
    ("availability", Polarity.BIG_POSITIVE, 0.0, 100.0),
    ("throughput", Polarity.BIG_POSITIVE, 0.0, 50.0),
    ("successability", Polarity.BIG_POSITIVE, 0.0, 100.0),
    ("reliability", Polarity.BIG_POSITIVE, 0.0, 100.0),
    ("compliance", Polarity.BIG_POSITIVE, 0.0, 100.0),
    ("best_practices", Polarity.BIG_POSITIVE, 0.0, 100.0),
    ("latency", Polarity.SMALL_POSITIVE, 0.0, 5000.0),
    ("documentation", Polarity.BIG_POSITIVE, 0.0, 100.0),
)
NAME_COLUMNS = ("service_name", "name", "service")


def qws_attributes(omega: float = 100.0) -> AttributeSet:
    return AttributeSet(tuple(AttributeSpec(n, pol, lo, hi) for n, pol, lo, hi in QWS_COLUMNS), omega)


def _canon(header: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", header.strip().lower()).strip("_")


@dataclass
class Roster:
    providers: List[Tuple[str, QosVector]]
    skipped: int = 0

    @property
    def ids(self) -> List[str]:
        return [pid for pid, _ in self.providers]

    def vectors(self) -> Dict[str, QosVector]:
        return dict(self.providers)


def ingest_dataset(
    path, keyword: Optional[str] = None, attributes: Optional[AttributeSet] = None
) -> Roster:
    """Read providers and their aggregate QoS vectors from a CSV file.

    Rows whose service name contains ``keyword`` (case-insensitive) are kept.
    Rows with missing or non-numeric values are skipped and counted.
    Duplicate service names get ``#2``, ``#3``... suffixes.
    """
    attributes = attributes or qws_attributes()
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedDataset(f"{path}: empty file") from None
        cols = {_canon(h): i for i, h in enumerate(header)}
        name_col = next((cols[n] for n in NAME_COLUMNS if n in cols), None)
        if name_col is None:
            raise MalformedDataset(f"{path}: no service-name column in {header}")
        missing = [s.name for s in attributes.specs if _canon(s.name) not in cols]
        if missing:
            raise MalformedDataset(f"{path}: missing attribute columns {missing}")
        idx = [cols[_canon(s.name)] for s in attributes.specs]

        providers: List[Tuple[str, QosVector]] = []
        seen: Dict[str, int] = {}
        skipped = 0
        needle = keyword.lower() if keyword else None
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            try:
                name = row[name_col].strip()
                values = tuple(float(row[i]) for i in idx)
                if not name or not all(math.isfinite(v) for v in values):
                    raise ValueError("blank name or non-finite value")
            except (IndexError, ValueError):
                skipped += 1
                continue
            if needle and needle not in name.lower():
                continue
            seen[name] = seen.get(name, 0) + 1
            pid = name if seen[name] == 1 else f"{name}#{seen[name]}"
            providers.append((pid, values))
    if skipped:
        log.warning("%s: skipped %d malformed rows", path, skipped)
    if not providers:
        raise NoMatches(f"{path}: no rows match keyword {keyword!r}")
    return Roster(providers, skipped)
