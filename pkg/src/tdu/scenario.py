"""The air-pollution monitoring scenario: owner, municipal and commercial policies."""

from __future__ import annotations

from .logic.terms import ModalLiteral
from .tduo.model import Condition, DeonticOperator, PolicyRule, UsagePolicy
from .tduo.scopes import Actor

DATA_OWNER_POLICY = UsagePolicy("urn:tdu:policy:data-owner", (
    PolicyRule(DeonticOperator.PERMISSION, Condition(
        temporality=("any",), spatiality=("any",), abstraction=("any",),
        actor=(Actor.DATA_OWNER,), purpose=("any",))),
))

MUNICIPAL_POLICY = UsagePolicy("urn:tdu:policy:municipal-authority", (
    PolicyRule(DeonticOperator.PERMISSION, Condition(
        temporality=("hourly",), spatiality=("street",), abstraction=("aggregation",),
        actor=(Actor.MUNICIPAL_AUTHORITY,))),
))

COMMERCIAL_POLICY = UsagePolicy("urn:tdu:policy:commercial-operator", (
    PolicyRule(DeonticOperator.PERMISSION, Condition(
        temporality=("weekly",), spatiality=("zone",), abstraction=("statistic",),
        actor=(Actor.COMMERCIAL_OPERATOR,))),
))

POLICIES = (DATA_OWNER_POLICY, MUNICIPAL_POLICY, COMMERCIAL_POLICY)

SUBJECTS = {"d": Actor.DATA_OWNER, "m": Actor.MUNICIPAL_AUTHORITY, "c": Actor.COMMERCIAL_OPERATOR}


def subject_facts(subjects=None):
    subjects = SUBJECTS if subjects is None else subjects
    return frozenset(ModalLiteral.of(actor.predicate, name) for name, actor in subjects.items())
