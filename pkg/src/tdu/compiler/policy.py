"""Usage policies to defeasible theories, merging, and conflict detection."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from ..logic.grounding import ground_theory
from ..logic.terms import (
    Atom,
    Literal,
    Modality,
    ModalLiteral,
    Rule,
    RuleKind,
    Theory,
    Var,
    conflict_set,
)
from ..tduo.model import DeonticOperator, UsagePolicy
from ..tduo.scopes import Actor, Dimension, coarser_levels

SUBJECT = Var("X")


class CompileError(ValueError):
    pass


def policy_slug(name: str) -> str:
    """Label-safe rendering of a policy URI."""
    slug = re.sub(r"[^A-Za-z0-9]+", "_", name).strip("_")
    if not slug or not (slug[0].isalpha() or slug[0] == "_"):
        slug = "p_" + slug
    return slug


def scope_literal(dimension: Dimension, value: str, subject=SUBJECT,
                  modality: Modality = Modality.PERM, negated: bool = False) -> ModalLiteral:
    return ModalLiteral(modality, Literal(Atom(dimension.predicate, (subject, value)), negated))


def actor_literal(actor: Actor, subject=SUBJECT) -> ModalLiteral:
    return ModalLiteral(Modality.FACT, Literal(Atom(actor.predicate, (subject,))))


def _resolve_actor(actor_class: Union[Actor, str, None]) -> Optional[Actor]:
    if actor_class is None or isinstance(actor_class, Actor):
        return actor_class
    try:
        return Actor.parse(actor_class)
    except ValueError:
        raise CompileError(f"unknown actor-class {actor_class!r}") from None


def compile_policy(policy: UsagePolicy, actor_class: Union[Actor, str, None] = None,
                   *, modal_conversion: bool = True) -> Theory:
    """One defeasible rule per (actor, scope value), plus lattice expansions.

    A rule's actors come from its condition; ``actor_class`` applies to rules
    whose condition names no actor.  Permissions (and obligations, which
    entail permissions) at a level also yield strict rules granting every
    coarser level of the same dimension.
    """
    default_actor = _resolve_actor(actor_class)
    slug = policy_slug(policy.name)
    rules: List[Rule] = []
    expanded = []
    for rule in policy.rules:
        actors = rule.condition.actor or ((default_actor,) if default_actor else ())
        if not actors:
            raise CompileError(
                f"policy {policy.name}: rule has no Actor condition and no actor-class was given")
        for actor in actors:
            for dim, value in rule.condition.scopes():
                if rule.operator is DeonticOperator.PERMISSION:
                    head = scope_literal(dim, value)
                elif rule.operator is DeonticOperator.OBLIGATION:
                    head = scope_literal(dim, value, modality=Modality.OBL)
                else:
                    head = scope_literal(dim, value, modality=Modality.OBL, negated=True)
                rules.append(Rule(f"{slug}_{len(rules)}", RuleKind.DEFEASIBLE, head.modality,
                                  (actor_literal(actor),), head))
                if rule.operator is not DeonticOperator.FORBIDDEN and (dim, value) not in expanded:
                    expanded.append((dim, value))
    expansions = []
    seen = set()
    for dim, value in expanded:
        for coarser in coarser_levels(value, dim):
            if (dim, value, coarser) in seen:
                continue
            seen.add((dim, value, coarser))
            expansions.append(Rule(f"{slug}_x{len(expansions)}", RuleKind.STRICT, Modality.PERM,
                                   (scope_literal(dim, value),), scope_literal(dim, coarser)))
    return Theory(frozenset(), tuple(rules + expansions), frozenset(), modal_conversion)


def merge_theories(theories: Sequence[Theory]) -> Theory:
    """Union of theories; labels used by more than one source get an ``s<i>_`` prefix."""
    theories = list(theories)
    if len(theories) == 1:
        return theories[0]
    counts: dict = {}
    for t in theories:
        for r in t.rules:
            counts[r.label] = counts.get(r.label, 0) + 1
    clashing = {lab for lab, n in counts.items() if n > 1}
    facts = set()
    rules: List[Rule] = []
    sup = set()
    for i, t in enumerate(theories):
        def rename(label: str, i=i) -> str:
            return f"s{i}_{label}" if label in clashing else label
        facts |= t.facts
        for r in t.rules:
            rules.append(Rule(rename(r.label), r.kind, r.mode, r.body, r.head, r.span))
        sup |= {(rename(w), rename(l)) for w, l in t.superiority}
    conversion = all(t.modal_conversion for t in theories) if theories else True
    return Theory(frozenset(facts), tuple(rules), frozenset(sup), conversion)


@dataclass(frozen=True)
class ConflictReport:
    pairs: Tuple[Tuple[str, str], ...]

    @property
    def empty(self) -> bool:
        return not self.pairs

    @property
    def source_pairs(self) -> Tuple[Tuple[str, str], ...]:
        """Pairs collapsed to the labels of the rules before grounding."""
        out = []
        for a, b in self.pairs:
            pair = (a.split("@")[0], b.split("@")[0])
            if pair not in out:
                out.append(pair)
        return tuple(out)

    def __str__(self) -> str:
        if not self.pairs:
            return "no conflicts"
        return "\n".join(f"unresolved conflict: {a} vs {b}" for a, b in self.source_pairs)


def detect_conflicts(theory: Theory) -> ConflictReport:
    """Rule pairs with mutually conflicting heads and no superiority between them."""
    ground = ground_theory(theory)
    by_head: dict = {}
    for idx, r in enumerate(ground.rules):
        by_head.setdefault(r.head, []).append((idx, r))
    pairs = []
    for idx, r in enumerate(ground.rules):
        for other in sorted(conflict_set(r.head), key=str):
            for jdx, s in by_head.get(other, ()):
                if jdx <= idx:
                    continue
                if (r.label, s.label) in ground.superiority or (s.label, r.label) in ground.superiority:
                    continue
                pairs.append((idx, jdx, r.label, s.label))
    pairs.sort()
    return ConflictReport(tuple((a, b) for _, _, a, b in pairs))


def compile_policies(policies: Iterable[UsagePolicy], *, modal_conversion: bool = True) -> Theory:
    theories = [compile_policy(p, modal_conversion=modal_conversion) for p in policies]
    if not theories:
        return Theory(modal_conversion=modal_conversion)
    return merge_theories(theories)
