"""Granularity levels and their coarseness order.

Each dimension is a chain from the most to the least revealing level.  The
wildcard ``any`` stands for every level of its dimension.
"""

from __future__ import annotations

from enum import Enum
from typing import Dict, Tuple

ANY = "any"


class Dimension(str, Enum):
    TEMPORAL = "temporal"
    SPATIAL = "spatial"
    ABSTRACTION = "abstraction"
    PURPOSE = "purpose"

    @property
    def predicate(self) -> str:
        return _PREDICATES[self]

    @property
    def levels(self) -> Tuple[str, ...]:
        """Concrete levels, finest first (purpose levels are unordered)."""
        return CHAINS[self]

    @property
    def values(self) -> Tuple[str, ...]:
        return CHAINS[self] + (ANY,)

    @property
    def ordered(self) -> bool:
        return self is not Dimension.PURPOSE


CHAINS: Dict[Dimension, Tuple[str, ...]] = {
    Dimension.TEMPORAL: ("secondly", "minutely", "hourly", "daily", "weekly", "monthly", "yearly"),
    Dimension.SPATIAL: ("street", "zone"),
    Dimension.ABSTRACTION: ("detail", "aggregation", "statistic"),
    Dimension.PURPOSE: ("commercial_use",),
}

_PREDICATES = {
    Dimension.TEMPORAL: "TemporalScope",
    Dimension.SPATIAL: "SpatialScope",
    Dimension.ABSTRACTION: "AbstractScope",
    Dimension.PURPOSE: "PurposeScope",
}

# XML element name for each level, per dimension
ELEMENT_NAMES: Dict[Dimension, Dict[str, str]] = {
    Dimension.TEMPORAL: {v: v.capitalize() for v in Dimension.TEMPORAL.values},
    Dimension.SPATIAL: {v: v.capitalize() for v in Dimension.SPATIAL.values},
    Dimension.ABSTRACTION: {v: v.capitalize() for v in Dimension.ABSTRACTION.values},
    Dimension.PURPOSE: {"commercial_use": "CommercialUse", ANY: "Any"},
}

# element order inside each *Scope element when serializing
ELEMENT_ORDER: Dict[Dimension, Tuple[str, ...]] = {
    Dimension.TEMPORAL: Dimension.TEMPORAL.values,
    Dimension.SPATIAL: Dimension.SPATIAL.values,
    Dimension.ABSTRACTION: ("aggregation", "detail", "statistic", ANY),
    Dimension.PURPOSE: ("commercial_use", ANY),
}


class Actor(str, Enum):
    DATA_OWNER = "DataOwner"
    MUNICIPAL_AUTHORITY = "MunicipalAuthority"
    COMMERCIAL_OPERATOR = "CommercialOperator"

    @property
    def predicate(self) -> str:
        return ACTOR_PREDICATES[self]

    @classmethod
    def parse(cls, name: str) -> "Actor":
        """Accept the full class name or its predicate (``CO``)."""
        for actor in cls:
            if name in (actor.value, actor.predicate) or name.lower() == actor.value.lower():
                return actor
        raise ValueError(f"unknown actor class {name!r}")


ACTOR_PREDICATES = {
    Actor.DATA_OWNER: "DO",
    Actor.MUNICIPAL_AUTHORITY: "MA",
    Actor.COMMERCIAL_OPERATOR: "CO",
}


def normalize(value: str, dimension: Dimension) -> str:
    """Map a level name in any case (``Hourly``, ``CommercialUse``) to its canonical value."""
    key = value.strip().lower().replace("-", "_")
    if dimension is Dimension.PURPOSE and key == "commercialuse":
        key = "commercial_use"
    if key not in dimension.values:
        raise ValueError(f"unknown {dimension.value} scope value {value!r}")
    return key


def rank(value: str, dimension: Dimension) -> int:
    return CHAINS[dimension].index(value)


def coarser_levels(value: str, dimension: Dimension) -> Tuple[str, ...]:
    """Levels strictly coarser than ``value``; for ``any``, every level."""
    if value == ANY:
        return CHAINS[dimension]
    if not dimension.ordered:
        return ()
    return CHAINS[dimension][rank(value, dimension) + 1:]


def subsumes(granted: str, requested: str, dimension: Dimension) -> bool:
    """Whether a grant at ``granted`` covers a request at ``requested``."""
    for v in (granted, requested):
        if v not in dimension.values:
            raise ValueError(f"{v!r} is not a {dimension.value} scope value")
    if granted == ANY or granted == requested:
        return True
    if requested == ANY or not dimension.ordered:
        return False
    return rank(requested, dimension) > rank(granted, dimension)
