"""Value types for data items and usage policies."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple

from .scopes import CHAINS, Actor, Dimension


class ModelError(ValueError):
    """A value violates the data-model invariants."""


def _nonempty(value: str, what: str) -> None:
    if not value:
        raise ModelError(f"{what} must be nonempty")


@dataclass(frozen=True)
class EntityId:
    id: str
    type: str

    def __post_init__(self):
        _nonempty(self.id, "EntityID Id")
        _nonempty(self.type, "EntityID Type")


@dataclass(frozen=True)
class EntityMetadata:
    name: str
    type: str = "string"
    value: str = ""

    def __post_init__(self):
        _nonempty(self.name, "EntityMetadata Name")


@dataclass(frozen=True)
class EntityAttribute:
    name: str
    type: str
    value: str
    metadata: Tuple[EntityMetadata, ...]

    def __post_init__(self):
        object.__setattr__(self, "metadata", tuple(self.metadata))
        if not self.metadata:
            raise ModelError(f"EntityAttribute {self.name!r} needs at least one EntityMetadata")


@dataclass(frozen=True)
class DataItem:
    entity_id: EntityId
    attributes: Tuple[EntityAttribute, ...] = ()
    attribute_domain_name: Optional[str] = None
    domain_metadata: Optional[Tuple[EntityMetadata, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if self.domain_metadata is not None:
            object.__setattr__(self, "domain_metadata", tuple(self.domain_metadata))

    def attribute(self, name: str) -> EntityAttribute:
        for a in self.attributes:
            if a.name == name:
                return a
        raise KeyError(name)

    def with_domain_metadata(self, *entries: EntityMetadata) -> "DataItem":
        return replace(self, domain_metadata=tuple(self.domain_metadata or ()) + entries)


def _canonical(values, dimension: Dimension) -> Tuple[str, ...]:
    order = CHAINS[dimension] + ("any",)
    unique = set(values)
    for v in unique:
        if v not in order:
            raise ModelError(f"unknown {dimension.value} scope value {v!r}")
    return tuple(v for v in order if v in unique)


@dataclass(frozen=True)
class Condition:
    temporality: Tuple[str, ...] = ()
    spatiality: Tuple[str, ...] = ()
    abstraction: Tuple[str, ...] = ()
    actor: Tuple[Actor, ...] = ()
    purpose: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "temporality", _canonical(self.temporality, Dimension.TEMPORAL))
        object.__setattr__(self, "spatiality", _canonical(self.spatiality, Dimension.SPATIAL))
        object.__setattr__(self, "abstraction", _canonical(self.abstraction, Dimension.ABSTRACTION))
        object.__setattr__(self, "purpose", _canonical(self.purpose, Dimension.PURPOSE))
        actors = {Actor(a) for a in self.actor}
        object.__setattr__(self, "actor", tuple(a for a in Actor if a in actors))
        if not any((self.temporality, self.spatiality, self.abstraction, self.actor, self.purpose)):
            raise ModelError("Condition needs at least one of Temporality, Spatiality, "
                             "Abstraction, Actor, Purpose")

    def scopes(self):
        """``(dimension, value)`` pairs in a fixed order."""
        for dim, values in ((Dimension.TEMPORAL, self.temporality),
                            (Dimension.SPATIAL, self.spatiality),
                            (Dimension.ABSTRACTION, self.abstraction),
                            (Dimension.PURPOSE, self.purpose)):
            for v in values:
                yield dim, v


class DeonticOperator(str, Enum):
    OBLIGATION = "Obligation"
    FORBIDDEN = "Forbidden"
    PERMISSION = "Permission"


@dataclass(frozen=True)
class PolicyRule:
    operator: DeonticOperator
    condition: Condition


@dataclass(frozen=True)
class UsagePolicy:
    name: str
    rules: Tuple[PolicyRule, ...] = field(default=())

    def __post_init__(self):
        _nonempty(self.name, "UsagePolicy Name")
        object.__setattr__(self, "rules", tuple(self.rules))

    def mentions(self, dimension: Dimension) -> bool:
        return any(dim is dimension for r in self.rules for dim, _ in r.condition.scopes())
