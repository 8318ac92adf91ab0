"""Seeded synthetic air-quality readings for simulated sensors."""

from __future__ import annotations

import random
from typing import List

from ..tduo.model import EntityId
from .readings import METRICS, Reading

RANGES = {
    "temperature": (-10.0, 40.0),
    "humidity": (10.0, 100.0),
    "co2": (350.0, 2000.0),
    "voc": (0.0, 1000.0),
}
# 2016-01-01T00:00:00Z
DEFAULT_START = 1451606400
SENSOR_TYPE = "AirQualitySensor"


def street_name(zone: int, street: int) -> str:
    return f"street-{zone}-{street}"


def zone_name(zone: int) -> str:
    return f"zone-{zone}"


def generate_synthetic(seed: int, count: int, streets_per_zone: int = 3, zones: int = 2,
                       span: int = 30 * 86400, start: int = DEFAULT_START) -> List[Reading]:
    """``count`` readings from one sensor per street, with whole-second timestamps in
    ``[start, start + span)``. Keys (sensor, metric, timestamp) never repeat."""
    if count < 0:
        raise ValueError("count must be >= 0")
    if streets_per_zone < 1 or zones < 1 or span < 1:
        raise ValueError("streets_per_zone, zones and span must be >= 1")
    capacity = zones * streets_per_zone * len(METRICS) * span
    if count > capacity:
        raise ValueError(f"cannot draw {count} distinct readings from {capacity} keys")
    rng = random.Random(seed)
    sensors = [(EntityId(f"sensor-{z}-{s}", SENSOR_TYPE), street_name(z, s), zone_name(z))
               for z in range(zones) for s in range(streets_per_zone)]
    seen = set()
    out: List[Reading] = []
    while len(out) < count:
        entity, street, zone = sensors[rng.randrange(len(sensors))]
        metric = METRICS[rng.randrange(len(METRICS))]
        ts = start + rng.randrange(span)
        if (entity.id, metric, ts) in seen:
            continue
        seen.add((entity.id, metric, ts))
        lo, hi = RANGES[metric]
        out.append(Reading(entity, metric, ts, street, zone, rng.uniform(lo, hi)))
    return out
