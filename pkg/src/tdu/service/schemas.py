from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class TargetIn(_Model):
    entityType: Optional[str] = None
    entityId: Optional[str] = None


class Window(_Model):
    start: float
    end: float

    @model_validator(mode="after")
    def _ordered(self):
        if not self.start < self.end:
            raise ValueError("window start must be before end")
        return self


class QueryIn(_Model):
    actorClass: str = Field(examples=["CommercialOperator"])
    spatial: str = Field(examples=["zone"])
    temporal: str = Field(examples=["weekly"])
    abstraction: str = Field(examples=["statistic"])
    purpose: Optional[str] = None
    subject: Optional[str] = None
    target: Optional[TargetIn] = None
    window: Optional[Window] = None


class FailedLiteralOut(_Model):
    literal: str
    delta: str
    partial: str
    reason: str


class DecisionOut(_Model):
    outcome: str
    request: Dict[str, Any]
    effectiveConstraints: Optional[Dict[str, str]]
    refusalReasons: List[FailedLiteralOut]
    trace: Dict[str, Any]


class QueryOut(_Model):
    recordId: int
    decision: DecisionOut
    items: List[Dict[str, Any]]


class PolicyAdded(_Model):
    name: str
    policies: int


class PolicyList(_Model):
    policies: List[Dict[str, Any]]


class ReadingsAdded(_Model):
    added: int
    duplicates: int
    total: int


class SubjectIn(_Model):
    name: str
    actorClass: str


class UsageRecordOut(_Model):
    recordId: int
    timestamp: float
    subject: str
    actorClass: str
    spatial: str
    temporal: str
    abstraction: str
    purpose: Optional[str]
    outcome: str
    policies: List[str]
    itemsReleased: int
    traceDigest: str


class HistoryOut(_Model):
    records: List[UsageRecordOut]


class Health(_Model):
    status: str
    policies: int
    readings: int
    records: int
