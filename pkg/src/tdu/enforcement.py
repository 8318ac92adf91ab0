"""Trust enforcement: prove a consumer's request against the owners' policies.

A request becomes a defeasible obligation rule whose body asks for the
actor class and a permission at every requested level.  The request is
granted exactly when that obligation is defeasibly provable.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .compiler.dsl import is_constant, parse_theory
from .compiler.policy import actor_literal, compile_policies, scope_literal, SUBJECT
from .logic.grounding import ground_rule, ground_theory
from .logic.reasoner import (
    PLUS_PARTIAL,
    ConclusionSet,
    Status,
    compute_conclusions,
    derivations,
    query,
    relevant_subtheory,
)
from .logic.terms import Atom, Literal, Modality, ModalLiteral, Rule, RuleKind, Theory
from .tduo.model import UsagePolicy
from .tduo.scopes import Actor, Dimension, normalize

REQUEST_LABEL = "consumer_request"
GRANTED = "Granted"
REFUSED = "Refused"


class RequestError(ValueError):
    pass


@dataclass(frozen=True)
class Target:
    """Which data a request is about; ``entity_id`` is a shell-style pattern."""

    entity_type: Optional[str] = None
    entity_id: Optional[str] = None


@dataclass(frozen=True)
class ConsumerRequest:
    subject: str
    actor_class: Actor
    spatial: str
    temporal: str
    abstraction: str
    purpose: Optional[str] = None
    target: Target = field(default_factory=Target)

    def __post_init__(self):
        if not is_constant(self.subject):
            raise RequestError(f"subject {self.subject!r} must match [a-z0-9][A-Za-z0-9_]*")
        try:
            object.__setattr__(self, "actor_class", Actor.parse(self.actor_class)
                               if isinstance(self.actor_class, str) else self.actor_class)
            object.__setattr__(self, "spatial", normalize(self.spatial, Dimension.SPATIAL))
            object.__setattr__(self, "temporal", normalize(self.temporal, Dimension.TEMPORAL))
            object.__setattr__(self, "abstraction", normalize(self.abstraction, Dimension.ABSTRACTION))
            if self.purpose is not None:
                object.__setattr__(self, "purpose", normalize(self.purpose, Dimension.PURPOSE))
        except ValueError as exc:
            raise RequestError(str(exc)) from None

    def levels(self) -> Dict[str, str]:
        return {"spatial": self.spatial, "temporal": self.temporal, "abstraction": self.abstraction}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subject": self.subject,
            "actorClass": self.actor_class.value,
            "spatial": self.spatial,
            "temporal": self.temporal,
            "abstraction": self.abstraction,
            "purpose": self.purpose,
            "target": {"entityType": self.target.entity_type, "entityId": self.target.entity_id},
        }

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> "ConsumerRequest":
        target = obj.get("target") or {}
        return cls(obj["subject"], obj["actorClass"], obj["spatial"], obj["temporal"],
                   obj["abstraction"], obj.get("purpose"),
                   Target(target.get("entityType"), target.get("entityId")))


def request_literal(subject) -> ModalLiteral:
    return ModalLiteral(Modality.OBL, Literal(Atom("ConsumerRequest", (subject,))))


def build_request_rule(request: ConsumerRequest, *, with_purpose: bool = True) -> Rule:
    body = [
        actor_literal(request.actor_class),
        scope_literal(Dimension.SPATIAL, request.spatial),
        scope_literal(Dimension.TEMPORAL, request.temporal),
        scope_literal(Dimension.ABSTRACTION, request.abstraction),
    ]
    if with_purpose and request.purpose is not None:
        body.append(scope_literal(Dimension.PURPOSE, request.purpose))
    return Rule(REQUEST_LABEL, RuleKind.DEFEASIBLE, Modality.OBL, tuple(body), request_literal(SUBJECT))


# -- decisions and traces --------------------------------------------------------

def tag_symbols(delta: Status, partial: Status) -> str:
    def one(status: Status, sym: str) -> str:
        return {"Proved": "+", "Disproved": "−", "Undetermined": "?"}[status.value] + sym
    return f"{one(delta, 'Δ')} {one(partial, '∂')}"


@dataclass(frozen=True)
class RuleOutcome:
    rule: str
    status: str
    beaten_by: Tuple[str, ...] = ()


@dataclass(frozen=True)
class LiteralTrace:
    literal: str
    delta: Status
    partial: Status
    supporting: Tuple[RuleOutcome, ...] = ()
    attacking: Tuple[RuleOutcome, ...] = ()

    @property
    def tags(self) -> str:
        return tag_symbols(self.delta, self.partial)


@dataclass(frozen=True)
class ProofTrace:
    goal: str
    theory: str
    modal_conversion: bool
    literals: Tuple[LiteralTrace, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "goal": self.goal,
            "modalConversion": self.modal_conversion,
            "theory": self.theory,
            "literals": [
                {
                    "literal": e.literal,
                    "delta": e.delta.value,
                    "partial": e.partial.value,
                    "supporting": [{"rule": s.rule, "status": s.status} for s in e.supporting],
                    "attacking": [{"rule": a.rule, "status": a.status, "beatenBy": list(a.beaten_by)}
                                  for a in e.attacking],
                }
                for e in self.literals
            ],
        }

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> "ProofTrace":
        return cls(obj["goal"], obj["theory"], obj["modalConversion"], tuple(
            LiteralTrace(
                e["literal"], Status(e["delta"]), Status(e["partial"]),
                tuple(RuleOutcome(s["rule"], s["status"]) for s in e["supporting"]),
                tuple(RuleOutcome(a["rule"], a["status"], tuple(a["beatenBy"])) for a in e["attacking"]))
            for e in obj["literals"]))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class FailedLiteral:
    literal: str
    delta: Status
    partial: Status
    reason: str


@dataclass(frozen=True)
class Decision:
    outcome: str
    request: ConsumerRequest
    effective_constraints: Optional[Dict[str, str]]
    refusal_reasons: Tuple[FailedLiteral, ...]
    trace: ProofTrace

    @property
    def granted(self) -> bool:
        return self.outcome == GRANTED

    def to_dict(self) -> Dict[str, Any]:
        return {
            "outcome": self.outcome,
            "request": self.request.to_dict(),
            "effectiveConstraints": self.effective_constraints,
            "refusalReasons": [
                {"literal": f.literal, "delta": f.delta.value, "partial": f.partial.value,
                 "reason": f.reason}
                for f in self.refusal_reasons
            ],
            "trace": self.trace.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> "Decision":
        return cls(obj["outcome"], ConsumerRequest.from_dict(obj["request"]),
                   obj["effectiveConstraints"],
                   tuple(FailedLiteral(f["literal"], Status(f["delta"]), Status(f["partial"]), f["reason"])
                         for f in obj["refusalReasons"]),
                   ProofTrace.from_dict(obj["trace"]))


# -- evaluation --------------------------------------------------------------------

def _purpose_enforced(policies: Sequence[UsagePolicy], actor: Actor) -> bool:
    for p in policies:
        for rule in p.rules:
            if rule.condition.purpose and (not rule.condition.actor or actor in rule.condition.actor):
                return True
    return False


class Enforcer:
    """Compiled policy state reused across evaluations.

    Ground instantiations are cached per active domain, so repeated requests
    over the same vocabulary only pay for the proof itself.
    """

    def __init__(self, policies: Iterable[UsagePolicy], *, modal_conversion: bool = True):
        self.policies = tuple(policies)
        self.modal_conversion = modal_conversion
        self.theory = compile_policies(self.policies, modal_conversion=modal_conversion)
        self._constants = frozenset(self.theory.constants())
        self._rule_lines = [str(r) for r in self.theory.rules]
        self._ground: Dict[frozenset, Theory] = {}
        self._lock = threading.Lock()

    def _ground_policies(self, constants: frozenset) -> Theory:
        with self._lock:
            cached = self._ground.get(constants)
        if cached is None:
            cached = ground_theory(self.theory, constants)
            with self._lock:
                self._ground[constants] = cached
        return cached

    def _text(self, facts: frozenset, rule: Rule) -> str:
        # same as format_theory() of the assembled theory; policy lines are cached
        lines = [f"fact {f}." for f in sorted(facts, key=str)]
        lines += self._rule_lines
        lines.append(str(rule))
        lines += [f"{w} > {l}." for w, l in sorted(self.theory.superiority)]
        return "\n".join(lines) + "\n"

    def evaluate(self, request: ConsumerRequest, facts: Iterable[ModalLiteral] = ()) -> Decision:
        facts = frozenset(facts)
        rule = build_request_rule(
            request, with_purpose=_purpose_enforced(self.policies, request.actor_class))
        constants = set(self._constants)
        for lit in (*facts, *rule.body):
            constants.update(lit.atom.constants())
        policy_ground = self._ground_policies(frozenset(constants))
        goal = request_literal(request.subject)
        instance = ground_rule(rule, [request.subject])[0]
        # Nothing in the policy theory mentions the request predicate, so the
        # goal's cone is its own rule plus the cone of that rule's body.
        cone = relevant_subtheory(policy_ground, instance.body)
        sub = Theory._unchecked(facts, cone.rules + (instance,), cone.superiority,
                                self.modal_conversion)
        conclusions = compute_conclusions(sub)
        return _decide(request, goal, list(instance.body), sub, conclusions,
                       self._text(facts, rule), self.modal_conversion)


def _decide(request: ConsumerRequest, goal: ModalLiteral, body: List[ModalLiteral],
            theory: Theory, conclusions: ConclusionSet, text: str, conversion: bool) -> Decision:
    granted = query(conclusions, PLUS_PARTIAL, goal)
    reasons = []
    for lit in body:
        delta, partial = conclusions[lit]
        if partial is Status.PROVED:
            continue
        if lit.modality is Modality.FACT:
            why = "unprovable actor class"
        elif partial is Status.UNDETERMINED:
            why = "undetermined (cyclic dependency)"
        else:
            why = "not defeasibly provable"
        reasons.append(FailedLiteral(str(lit), delta, partial, why))
    if not granted and not reasons:
        delta, partial = conclusions[goal]
        reasons.append(FailedLiteral(str(goal), delta, partial, "request obligation is defeated"))
    entries = tuple(
        LiteralTrace(
            str(p.literal), p.delta, p.partial,
            tuple(RuleOutcome(s.label, s.status) for s in p.supporting),
            tuple(RuleOutcome(a.label, a.status, a.beaten_by) for a in p.attacking))
        for p in derivations(theory, conclusions, [goal, *body]))
    trace = ProofTrace(str(goal), text, conversion, entries)
    return Decision(GRANTED if granted else REFUSED, request,
                    request.levels() if granted else None,
                    () if granted else tuple(reasons), trace)


def evaluate(request: ConsumerRequest, policies: Iterable[UsagePolicy],
             facts: Iterable[ModalLiteral] = (), *, modal_conversion: bool = True) -> Decision:
    """Decide one request from scratch (compile, merge, ground, prove)."""
    return Enforcer(policies, modal_conversion=modal_conversion).evaluate(request, facts)


def replay(trace: ProofTrace) -> bool:
    """Re-run the recorded theory and check every recorded tag."""
    theory = dataclasses.replace(parse_theory(trace.theory), modal_conversion=trace.modal_conversion)
    conclusions = compute_conclusions(ground_theory(theory))
    by_name = {str(lit): tags for lit, tags in conclusions.items()}
    default = (Status.DISPROVED, Status.DISPROVED)
    return all(by_name.get(e.literal, default) == (e.delta, e.partial) for e in trace.literals)


def explain(decision: Decision) -> str:
    req = decision.request
    lines = [
        f"Decision: {decision.outcome}",
        f"Request: {req.actor_class.value} {req.subject} (spatial={req.spatial}, "
        f"temporal={req.temporal}, abstraction={req.abstraction}"
        + (f", purpose={req.purpose})" if req.purpose else ")"),
    ]
    entries = {e.literal: e for e in decision.trace.literals}
    goal = entries[decision.trace.goal]
    lines.append(f"Goal {goal.literal}: {goal.tags}")
    if decision.granted:
        lines.append("Supported by:")
        for e in decision.trace.literals[1:]:
            fired = [s.rule for s in e.supporting if s.status == "applicable"]
            lines.append(f"  {e.literal}: {e.tags}" + (f" via {', '.join(fired)}" if fired else " (fact)"))
        return "\n".join(lines) + "\n"
    lines.append("Unprovable:")
    unsupported = 0
    permission_lits = 0
    for reason in decision.refusal_reasons:
        e = entries.get(reason.literal)
        lines.append(f"  {reason.literal}: {tag_symbols(reason.delta, reason.partial)} ({reason.reason})")
        if e is None:
            continue
        if reason.literal.startswith("[P]"):
            permission_lits += 1
            if not e.supporting:
                unsupported += 1
        if not e.supporting:
            lines.append("    no rule supports this literal")
        for s in e.supporting:
            lines.append(f"    rule {s.rule}: {s.status}")
        for a in e.attacking:
            verdict = f"beaten by {', '.join(a.beaten_by)}" if a.beaten_by else "not beaten"
            lines.append(f"    attacked by {a.rule} ({a.status}, {verdict})")
    if permission_lits and unsupported == permission_lits:
        lines.append("No rule supports any [P] literal of the request.")
    return "\n".join(lines) + "\n"
