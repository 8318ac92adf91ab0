"""Spatial, temporal and abstraction reductions that realize a granted request."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..tduo.model import DataItem, EntityAttribute, EntityId, EntityMetadata, UsagePolicy
from ..tduo.scopes import ANY, Dimension, normalize
from .readings import UNITS, Dataset, Reading

_FIXED = {"secondly": 1, "minutely": 60, "hourly": 3600, "daily": 86400}
_WEEK = 7 * 86400
# 1970-01-05 was the first Monday after the epoch
_MONDAY = 4 * 86400


@dataclass(frozen=True)
class TransformSpec:
    spatial: str = ANY
    temporal: str = ANY
    abstraction: str = ANY

    def __post_init__(self):
        object.__setattr__(self, "spatial", normalize(self.spatial, Dimension.SPATIAL))
        object.__setattr__(self, "temporal", normalize(self.temporal, Dimension.TEMPORAL))
        object.__setattr__(self, "abstraction", normalize(self.abstraction, Dimension.ABSTRACTION))

    @property
    def reduces(self) -> bool:
        return self.abstraction in ("aggregation", "statistic")

    def metadata(self) -> Tuple[EntityMetadata, ...]:
        return (EntityMetadata("spatialLevel", "string", self.spatial),
                EntityMetadata("temporalLevel", "string", self.temporal),
                EntityMetadata("abstractionLevel", "string", self.abstraction))


def bucket_start(timestamp: float, level: str):
    """Start of the UTC calendar bucket containing ``timestamp``.

    ``any`` keeps the exact timestamp.
    """
    if level == ANY:
        return timestamp
    seconds = math.floor(timestamp)
    if level in _FIXED:
        step = _FIXED[level]
        return seconds - seconds % step
    if level == "weekly":
        return seconds - (seconds - _MONDAY) % _WEEK
    when = datetime.fromtimestamp(seconds, tz=timezone.utc)
    if level == "monthly":
        start = datetime(when.year, when.month, 1, tzinfo=timezone.utc)
    elif level == "yearly":
        start = datetime(when.year, 1, 1, tzinfo=timezone.utc)
    else:
        raise ValueError(f"unknown temporal level {level!r}")
    return int(start.timestamp())


def spatial_key(reading: Reading, level: str) -> str:
    if level == "street":
        return reading.street
    if level == "zone":
        return reading.zone
    return reading.entity.id


@dataclass(frozen=True)
class GroupKey:
    metric: str
    place: str
    bucket: float

    def sort_key(self):
        return (self.bucket, self.metric, self.place)


@dataclass
class Group:
    key: GroupKey
    readings: List[Reading] = field(default_factory=list)

    @property
    def values(self) -> List[float]:
        return [r.value for r in self.readings]

    def stats(self) -> Dict[str, float]:
        vals = self.values
        return {"mean": math.fsum(vals) / len(vals), "min": min(vals), "max": max(vals),
                "count": len(vals)}


def group(readings: Iterable[Reading], spec: TransformSpec) -> List[Group]:
    """Readings partitioned by metric, spatial unit and time bucket, in output order."""
    buckets: Dict[tuple, List[Reading]] = {}
    for r in readings:
        key = (bucket_start(r.timestamp, spec.temporal), r.metric, spatial_key(r, spec.spatial))
        members = buckets.get(key)
        if members is None:
            buckets[key] = members = []
        members.append(r)
    return [Group(GroupKey(metric, place, b), members)
            for (b, metric, place), members in sorted(buckets.items(), key=lambda kv: kv[0])]


_SOURCE = (EntityMetadata("source", "string", "tdu"),)
_SECONDS = EntityMetadata("unit", "string", "s")
_ONE = EntityMetadata("unit", "string", "1")
_UNIT_META = {m: EntityMetadata("unit", "string", u) for m, u in UNITS.items()}


def _attr(name: str, type_: str, value, *meta: EntityMetadata) -> EntityAttribute:
    return EntityAttribute(name, type_, str(value), meta or _SOURCE)


def _number(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _unit(metric: str) -> EntityMetadata:
    return _UNIT_META[metric]


@lru_cache(maxsize=4096)
def _place_attr(spec: TransformSpec, place: str) -> EntityAttribute:
    name = spec.spatial if spec.spatial != ANY else "entity"
    return _attr(name, "string", place)


@lru_cache(maxsize=4096)
def _time_attr(spec: TransformSpec, bucket) -> EntityAttribute:
    name = "timestamp" if spec.temporal == ANY else "bucketStart"
    return _attr(name, "number", _number(bucket), _SECONDS)


def _passthrough(r: Reading, meta: Tuple[EntityMetadata, ...]) -> DataItem:
    attrs = (
        _attr("metric", "string", r.metric),
        _attr("street", "string", r.street),
        _attr("zone", "string", r.zone),
        _attr("timestamp", "number", _number(r.timestamp), _SECONDS),
        _attr("value", "number", repr(r.value), _unit(r.metric)),
    )
    return DataItem(r.entity, attrs, r.metric, meta)


def _detail(g: Group, spec: TransformSpec, meta: Tuple[EntityMetadata, ...]) -> List[DataItem]:
    """Unaggregated values with identifying keys coarsened to the granted levels."""
    out = []
    k = g.key
    keys = (_attr("metric", "string", k.metric), _place_attr(spec, k.place),
            _time_attr(spec, k.bucket))
    for n, r in enumerate(g.readings):
        eid = (r.entity if spec.spatial == ANY
               else EntityId(f"{k.metric}/{k.place}/{_number(k.bucket)}/{n}", "AirQualityReading"))
        attrs = keys + (_attr("value", "number", repr(r.value), _unit(r.metric)),)
        out.append(DataItem(eid, attrs, k.metric, meta))
    return out


def _summary(g: Group, spec: TransformSpec, meta: Tuple[EntityMetadata, ...]) -> DataItem:
    k = g.key
    stats = g.stats()
    attrs = [_attr("metric", "string", k.metric), _place_attr(spec, k.place),
             _time_attr(spec, k.bucket), _attr("mean", "number", repr(stats["mean"]), _unit(k.metric))]
    if spec.abstraction == "statistic":
        attrs += [_attr("min", "number", repr(stats["min"]), _unit(k.metric)),
                  _attr("max", "number", repr(stats["max"]), _unit(k.metric)),
                  _attr("count", "integer", stats["count"], _ONE)]
    eid = EntityId(f"{k.metric}/{k.place}/{_number(k.bucket)}", "AirQualityAggregate")
    return DataItem(eid, tuple(attrs), k.metric, meta)


def transform(dataset: Dataset, spec: TransformSpec, window: Optional[Tuple[float, float]] = None
              ) -> List[DataItem]:
    """Data items for the readings in ``[t0, t1)`` at the levels of ``spec``."""
    if window is not None:
        t0, t1 = window
        if not t0 < t1:
            raise ValueError(f"window must satisfy t0 < t1, got [{t0}, {t1})")
        readings: Sequence[Reading] = dataset.window(t0, t1)
    else:
        readings = dataset.readings
    meta = spec.metadata()
    if not spec.reduces and spec.spatial == ANY and spec.temporal == ANY:
        return [_passthrough(r, meta) for r in readings]
    out: List[DataItem] = []
    for g in group(readings, spec):
        if spec.reduces:
            out.append(_summary(g, spec, meta))
        else:
            out.extend(_detail(g, spec, meta))
    return out


def annotate(item: DataItem, policy: UsagePolicy) -> DataItem:
    """Attach the policy URI to the item's domain metadata, once."""
    entry = EntityMetadata("usagePolicy", "URI", policy.name)
    if entry in (item.domain_metadata or ()):
        return item
    return item.with_domain_metadata(entry)
