"""Sensor readings, datasets and their CSV / newline-delimited storage."""

from __future__ import annotations

import bisect
import csv
import io
import json
import math
import os
import threading
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..tduo.model import EntityId

METRICS = ("temperature", "humidity", "co2", "voc")
UNITS = {"temperature": "Cel", "humidity": "%RH", "co2": "ppm", "voc": "ppb"}
CSV_HEADER = ("entity_id", "entity_type", "metric", "timestamp", "street", "zone", "value")


class IngestError(ValueError):
    pass


class DuplicateReadingWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Reading:
    entity: EntityId
    metric: str
    timestamp: float
    street: str
    zone: str
    value: float

    @property
    def key(self) -> Tuple[str, str, float]:
        return (self.entity.id, self.metric, self.timestamp)

    def check(self) -> None:
        if self.metric not in METRICS:
            raise IngestError(f"reading {self.key}: unknown metric {self.metric!r}")
        if not (isinstance(self.timestamp, (int, float)) and math.isfinite(self.timestamp)
                and self.timestamp >= 0):
            raise IngestError(f"reading {self.key}: timestamp must be a finite number >= 0")
        if not math.isfinite(self.value):
            raise IngestError(f"reading {self.key}: value must be finite")
        if not self.street or not self.zone:
            raise IngestError(f"reading {self.key}: street and zone must be nonempty")

    def to_dict(self) -> Dict:
        return {"entity_id": self.entity.id, "entity_type": self.entity.type, "metric": self.metric,
                "timestamp": self.timestamp, "street": self.street, "zone": self.zone,
                "value": self.value}

    @classmethod
    def from_dict(cls, obj: Dict) -> "Reading":
        return cls(EntityId(obj["entity_id"], obj["entity_type"]), obj["metric"],
                   obj["timestamp"], obj["street"], obj["zone"], float(obj["value"]))


def _sort_key(r: Reading):
    return (r.timestamp, r.entity.id, r.metric)


class Dataset:
    """Readings ordered by (timestamp, entity id, metric), with a lookup index."""

    def __init__(self, readings: Sequence[Reading] = (), rejected: Sequence[Reading] = ()):
        self.readings: Tuple[Reading, ...] = tuple(sorted(readings, key=_sort_key))
        self.rejected: Tuple[Reading, ...] = tuple(rejected)
        self._times = [r.timestamp for r in self.readings]
        self.zones: Dict[str, str] = {r.street: r.zone for r in self.readings}
        self.index: Dict[Tuple[str, str], List[Reading]] = {}
        for r in self.readings:
            self.index.setdefault((r.metric, r.street), []).append(r)

    def __len__(self) -> int:
        return len(self.readings)

    def __iter__(self):
        return iter(self.readings)

    def window(self, t0: Optional[float] = None, t1: Optional[float] = None) -> Tuple[Reading, ...]:
        """Readings with ``t0 <= timestamp < t1``; open ends are unbounded."""
        lo = 0 if t0 is None else bisect.bisect_left(self._times, t0)
        hi = len(self._times) if t1 is None else bisect.bisect_left(self._times, t1)
        return self.readings[lo:hi]

    def span(self) -> Optional[Tuple[float, float]]:
        if not self.readings:
            return None
        return self._times[0], self._times[-1]

    def ingest(self, readings: Iterable[Reading]) -> "Dataset":
        return ingest(readings, self)


def ingest(readings: Iterable[Reading], existing: Optional[Dataset] = None) -> Dataset:
    """Add readings, keeping the first of any (entity, metric, timestamp) duplicate."""
    kept = list(existing.readings) if existing else []
    rejected = list(existing.rejected) if existing else []
    keys = {r.key for r in kept}
    zones = dict(existing.zones) if existing else {}
    for r in readings:
        r.check()
        zone = zones.setdefault(r.street, r.zone)
        if zone != r.zone:
            raise IngestError(f"reading {r.key}: street {r.street!r} is in zone {zone!r}, "
                              f"not {r.zone!r}")
        if r.key in keys:
            warnings.warn(f"duplicate reading {r.key} ignored", DuplicateReadingWarning, stacklevel=2)
            rejected.append(r)
            continue
        keys.add(r.key)
        kept.append(r)
    return Dataset(kept, rejected)


def _number(text: str):
    value = float(text)
    return int(value) if value.is_integer() and "." not in text and "e" not in text.lower() else value


def parse_readings_csv(text: str) -> List[Reading]:
    if not text.strip():
        return []
    rows = csv.reader(io.StringIO(text))
    header = tuple(h.strip() for h in next(rows))
    if header != CSV_HEADER:
        raise IngestError(f"CSV header must be {','.join(CSV_HEADER)}")
    out = []
    for line_no, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise IngestError(f"line {line_no}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        eid, etype, metric, ts, street, zone, value = (c.strip() for c in row)
        try:
            out.append(Reading(EntityId(eid, etype), metric, _number(ts), street, zone, float(value)))
        except ValueError as exc:
            raise IngestError(f"line {line_no}: {exc}") from None
    return out


def format_readings_csv(readings: Iterable[Reading]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in readings:
        writer.writerow([r.entity.id, r.entity.type, r.metric, r.timestamp, r.street, r.zone,
                         repr(r.value)])
    return buf.getvalue()


class ReadingStore:
    """Append-only newline-delimited JSON file backing one dataset."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.dataset = self._load()

    def _load(self) -> Dataset:
        readings = []
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        readings.append(Reading.from_dict(json.loads(line)))
        return Dataset(readings)

    def add(self, readings: Iterable[Reading]) -> Dataset:
        """Ingest and persist; returns the new dataset (``rejected`` holds this batch's duplicates)."""
        with self._lock:
            before = self.dataset
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", DuplicateReadingWarning)
                merged = ingest(readings, Dataset(before.readings))
            old = {b.key for b in before.readings}
            new = [r for r in merged.readings if r.key not in old]
            if new:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                blob = "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in new)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(blob)
                    fh.flush()
                    os.fsync(fh.fileno())
            self.dataset = merged
        for w in caught:
            warnings.warn(w.message, w.category, stacklevel=2)
        return merged
