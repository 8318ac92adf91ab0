"""Append-only usage ledger.

File format: one record per line, ``<sha256 hex of payload> <payload>\\n``,
where the payload is the record as JSON with sorted keys and no whitespace.
A final line that is incomplete or fails its checksum is a torn write from
a crash; it is dropped and truncated on open. A bad line anywhere else is
corruption and raises.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from .tduo.model import DataItem, EntityAttribute, EntityId, EntityMetadata

RECORD_TYPE = "UsageRecord"


class LedgerError(RuntimeError):
    pass


@dataclass(frozen=True)
class UsageRecord:
    subject: str
    actor_class: str
    spatial: str
    temporal: str
    abstraction: str
    outcome: str
    policies: Tuple[str, ...] = ()
    items_released: int = 0
    trace_digest: str = ""
    purpose: Optional[str] = None
    timestamp: float = 0.0
    record_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "policies", tuple(self.policies))

    _KEYS = {"record_id": "recordId", "actor_class": "actorClass",
             "items_released": "itemsReleased", "trace_digest": "traceDigest"}

    def to_dict(self) -> Dict[str, Any]:
        out = {self._KEYS.get(k, k): v for k, v in asdict(self).items()}
        out["policies"] = list(self.policies)
        return out

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> "UsageRecord":
        back = {v: k for k, v in cls._KEYS.items()}
        return cls(**{back.get(k, k): v for k, v in obj.items()})


def _payload(record: UsageRecord) -> str:
    return json.dumps(record.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def encode_line(record: UsageRecord) -> bytes:
    payload = _payload(record)
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    return f"{digest} {payload}\n".encode("utf-8")


def decode_line(line: bytes) -> UsageRecord:
    """Parse one line (without its newline); raises ``LedgerError`` when malformed."""
    try:
        text = line.decode("utf-8")
        digest, payload = text.split(" ", 1)
    except (UnicodeDecodeError, ValueError):
        raise LedgerError("malformed ledger line") from None
    if hashlib.sha256(payload.encode("utf-8")).hexdigest() != digest:
        raise LedgerError("ledger line checksum mismatch")
    try:
        return UsageRecord.from_dict(json.loads(payload))
    except (ValueError, TypeError) as exc:
        raise LedgerError(f"ledger line payload invalid: {exc}") from None


class Ledger:
    """Durable, totally ordered log of enforcement transactions."""

    def __init__(self, path: Path, clock: Callable[[], float] = time.time):
        self.path = Path(path)
        self.clock = clock
        self._lock = threading.Lock()
        self._records: List[UsageRecord] = []
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        data = self.path.read_bytes()
        lines = data.split(b"\n")
        # the piece after the last newline is empty for a clean file
        tail = lines.pop()
        good_bytes = len(data) - len(tail)
        for i, line in enumerate(lines):
            try:
                rec = decode_line(line)
            except LedgerError as exc:
                if i == len(lines) - 1 and not tail:
                    good_bytes -= len(line) + 1
                    break
                raise LedgerError(f"{self.path}: line {i + 1}: {exc}") from None
            if self._records and rec.record_id <= self._records[-1].record_id:
                raise LedgerError(f"{self.path}: line {i + 1}: record ids not increasing")
            self._records.append(rec)
        if good_bytes != len(data):
            with open(self.path, "r+b") as fh:
                fh.truncate(good_bytes)
                os.fsync(fh.fileno())

    def __len__(self) -> int:
        return len(self._records)

    @property
    def next_id(self) -> int:
        return self._records[-1].record_id + 1 if self._records else 1

    def append(self, record: UsageRecord) -> int:
        """Assign the next id (and a timestamp if unset), persist, and return the id."""
        with self._lock:
            rec = replace(record, record_id=self.next_id,
                          timestamp=record.timestamp or float(self.clock()))
            line = encode_line(rec)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "ab") as fh:
                start = fh.tell()
                try:
                    fh.write(line)
                    fh.flush()
                    os.fsync(fh.fileno())
                except OSError:
                    fh.truncate(start)
                    raise
            self._records.append(rec)
            return rec.record_id

    def records(self) -> List[UsageRecord]:
        with self._lock:
            return list(self._records)

    def history(self, policy: Optional[str] = None, subject: Optional[str] = None,
                outcome: Optional[str] = None, since: Optional[float] = None,
                until: Optional[float] = None) -> List[UsageRecord]:
        """Matching records in id order; the time range is ``[since, until)``."""
        return [r for r in self.records()
                if (policy is None or policy in r.policies)
                and (subject is None or r.subject == subject)
                and (outcome is None or r.outcome == outcome)
                and (since is None or r.timestamp >= since)
                and (until is None or r.timestamp < until)]


_META = (EntityMetadata("source", "string", "ledger"),)
_FIELDS = (
    ("recordId", "integer"), ("timestamp", "number"), ("subject", "string"),
    ("actorClass", "string"), ("spatial", "string"), ("temporal", "string"),
    ("abstraction", "string"), ("purpose", "string"), ("outcome", "string"),
    ("itemsReleased", "integer"), ("traceDigest", "string"),
)


def as_data_item(record: UsageRecord) -> DataItem:
    """The record as a data item; each consulted policy is its own ``policy`` attribute."""
    d = record.to_dict()
    attrs = []
    for name, typ in _FIELDS:
        value = d[name]
        if value is None:
            continue
        attrs.append(EntityAttribute(name, typ, repr(value) if typ == "number" else str(value), _META))
    attrs += [EntityAttribute("policy", "URI", p, _META) for p in record.policies]
    return DataItem(EntityId(f"urn:tdu:usage:{record.record_id}", RECORD_TYPE), tuple(attrs),
                    "usage")


def record_from_data_item(item: DataItem) -> UsageRecord:
    if item.entity_id.type != RECORD_TYPE:
        raise ValueError(f"not a usage record item: type {item.entity_id.type!r}")
    types = dict(_FIELDS)
    out: Dict[str, Any] = {"purpose": None}
    policies = []
    for a in item.attributes:
        if a.name == "policy":
            policies.append(a.value)
        elif types.get(a.name) == "integer":
            out[a.name] = int(a.value)
        elif types.get(a.name) == "number":
            out[a.name] = float(a.value)
        elif a.name in types:
            out[a.name] = a.value
        else:
            raise ValueError(f"unexpected usage record attribute {a.name!r}")
    out["policies"] = policies
    return UsageRecord.from_dict(out)
