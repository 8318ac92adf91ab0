"""JSON payloads shared by the HTTP service and the offline CLI.

Both paths build their answers here, so a decision obtained either way
serializes to the same bytes apart from record ids and timestamps.
"""

from __future__ import annotations

import json
from typing import Any, Dict, Optional

from ..enforcement import ConsumerRequest, RequestError, Target
from ..tduo.codec import data_item_to_dict, policy_to_dict
from ..tduo.scopes import Actor
from .core import Platform, QueryResult, default_subject


def make_request(actor: str, spatial: str, temporal: str, abstraction: str,
                 purpose: Optional[str] = None, subject: Optional[str] = None,
                 entity_type: Optional[str] = None, entity_id: Optional[str] = None
                 ) -> ConsumerRequest:
    """A request; without ``subject`` it speaks for the actor class as a whole."""
    try:
        actor_class = Actor.parse(actor)
    except ValueError as exc:
        raise RequestError(str(exc)) from None
    return ConsumerRequest(subject or default_subject(actor_class), actor_class, spatial, temporal,
                           abstraction, purpose, Target(entity_type, entity_id))


def query_payload(result: QueryResult) -> Dict[str, Any]:
    return {
        "recordId": result.record_id,
        "decision": result.decision.to_dict(),
        "items": [data_item_to_dict(i) for i in result.items],
    }


def run_query(platform: Platform, body: Dict[str, Any]) -> Dict[str, Any]:
    """Evaluate a JSON query body (``ConsumerRequest`` fields plus optional ``window``)."""
    target = body.get("target") or {}
    request = make_request(body["actorClass"], body["spatial"], body["temporal"],
                           body["abstraction"], body.get("purpose"), body.get("subject"),
                           target.get("entityType"), target.get("entityId"))
    window = body.get("window")
    if window is not None:
        window = (window["start"], window["end"])
    return query_payload(platform.query(request, window))


def history_payload(platform: Platform, **filters) -> Dict[str, Any]:
    return {"records": [r.to_dict() for r in platform.history(**filters)]}


def policies_payload(platform: Platform) -> Dict[str, Any]:
    return {"policies": [policy_to_dict(p) for p in platform.policies()]}


def dumps(payload: Dict[str, Any]) -> str:
    """Canonical text form used by the CLI's ``--json`` output."""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)

