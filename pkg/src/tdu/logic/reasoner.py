"""Proof conditions for ground modal defeasible logic.

The four tag sets (+D, -D, +d, -d) grow monotonically, pass after pass, until
nothing changes.  Whatever is left unsettled at that point depends on itself
through a cycle and is reported as undetermined.

Superiority is consulted per attacker: an attacker is beaten when any
applicable strict or defeasible rule for the literal is superior to it.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Tuple

from .terms import Modality, ModalLiteral, Rule, RuleKind, Theory, TheoryError, conflict_set


class Status(str, Enum):
    PROVED = "Proved"
    DISPROVED = "Disproved"
    UNDETERMINED = "Undetermined"


class Polarity(str, Enum):
    PLUS = "+"
    MINUS = "-"


class Strength(str, Enum):
    DELTA = "Delta"
    PARTIAL = "Partial"


@dataclass(frozen=True)
class ProofTag:
    polarity: Polarity
    strength: Strength

    def __str__(self) -> str:
        sign = "+" if self.polarity is Polarity.PLUS else "−"
        return sign + ("Δ" if self.strength is Strength.DELTA else "∂")


PLUS_DELTA = ProofTag(Polarity.PLUS, Strength.DELTA)
MINUS_DELTA = ProofTag(Polarity.MINUS, Strength.DELTA)
PLUS_PARTIAL = ProofTag(Polarity.PLUS, Strength.PARTIAL)
MINUS_PARTIAL = ProofTag(Polarity.MINUS, Strength.PARTIAL)

_UNKNOWN = (Status.DISPROVED, Status.DISPROVED)


class ConclusionSet(Mapping):
    """Immutable map from ground literal to ``(delta, partial)`` status.

    Literals outside the theory's vocabulary have no rules and no facts, so
    they are definitely and defeasibly refuted.
    """

    def __init__(self, table: Dict[ModalLiteral, Tuple[Status, Status]]):
        self._table = MappingProxyType(dict(table))

    def __getitem__(self, lit: ModalLiteral) -> Tuple[Status, Status]:
        return self._table.get(lit, _UNKNOWN)

    def __iter__(self):
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __contains__(self, lit) -> bool:
        return lit in self._table

    def __eq__(self, other) -> bool:
        if isinstance(other, ConclusionSet):
            return dict(self._table) == dict(other._table)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._table.items()))

    def delta(self, lit: ModalLiteral) -> Status:
        return self[lit][0]

    def partial(self, lit: ModalLiteral) -> Status:
        return self[lit][1]

    def sorted_items(self) -> List[Tuple[ModalLiteral, Tuple[Status, Status]]]:
        return sorted(self._table.items(), key=lambda kv: str(kv[0]))


def conversion_rules(theory: Theory) -> List[Rule]:
    """Strict rules ``[O]p -> [P]p`` for every obligation in the theory."""
    if not theory.modal_conversion:
        return []
    obligations = {r.head for r in theory.rules if r.mode is Modality.OBL}
    obligations |= {f for f in theory.facts if f.modality is Modality.OBL}
    obligations = {o for o in obligations if o.is_ground}
    return [
        Rule(f"__conv{i}", RuleKind.STRICT, Modality.PERM, (o,), o.with_modality(Modality.PERM))
        for i, o in enumerate(sorted(obligations, key=str))
    ]


class _Prepared:
    """Indexes over a ground theory plus its implicit conversion rules."""

    def __init__(self, theory: Theory):
        if not theory.is_ground:
            raise TheoryError("compute_conclusions requires a ground theory")
        self.theory = theory
        self.rules: List[Rule] = list(theory.rules) + conversion_rules(theory)
        self.facts = theory.facts
        self.sup = theory.superiority
        universe = set(theory.facts)
        for r in self.rules:
            universe.add(r.head)
            universe.update(r.body)
        for lit in list(universe):
            universe.update(conflict_set(lit))
        self.order = sorted(universe, key=str)
        self.strict: Dict[ModalLiteral, List[Rule]] = defaultdict(list)
        self.supportive: Dict[ModalLiteral, List[Rule]] = defaultdict(list)
        self.any_rule: Dict[ModalLiteral, List[Rule]] = defaultdict(list)
        for r in self.rules:
            self.any_rule[r.head].append(r)
            if r.kind is RuleKind.STRICT:
                self.strict[r.head].append(r)
            if r.kind is not RuleKind.DEFEATER:
                self.supportive[r.head].append(r)
        self.conflicts = {q: sorted(conflict_set(q), key=str) for q in self.order}
        self.attackers = {
            q: [s for c in self.conflicts[q] for s in self.any_rule.get(c, ())]
            for q in self.order
        }


def _fixpoint(p: _Prepared):
    pd, md, pp, mp = set(), set(), set(), set()

    def applicable(r: Rule) -> bool:
        return all(b in pp for b in r.body)

    def discarded(r: Rule) -> bool:
        return any(b in mp for b in r.body)

    def plus_partial(q) -> bool:
        if q in pd:
            return True
        if not all(c in md for c in p.conflicts[q]):
            return False
        support = p.supportive.get(q, ())
        if not any(applicable(r) for r in support):
            return False
        for s in p.attackers[q]:
            if discarded(s):
                continue
            if not any((t.label, s.label) in p.sup and applicable(t) for t in support):
                return False
        return True

    def minus_partial(q) -> bool:
        if q not in md:
            return False
        if any(c in pd for c in p.conflicts[q]):
            return True
        support = p.supportive.get(q, ())
        if all(discarded(r) for r in support):
            return True
        for s in p.attackers[q]:
            if applicable(s) and all(
                    discarded(t) or (t.label, s.label) not in p.sup for t in support):
                return True
        return False

    changed = True
    while changed:
        changed = False
        for q in p.order:
            if q in pd or q in md:
                continue
            strict = p.strict.get(q, ())
            if q in p.facts or any(all(b in pd for b in r.body) for r in strict):
                pd.add(q)
                changed = True
            elif all(any(b in md for b in r.body) for r in strict):
                md.add(q)
                changed = True
        for q in p.order:
            if q in pp or q in mp:
                continue
            if plus_partial(q):
                pp.add(q)
                changed = True
            elif minus_partial(q):
                mp.add(q)
                changed = True
    return pd, md, pp, mp


def relevant_subtheory(theory: Theory, goals: Iterable[ModalLiteral]) -> Theory:
    """The part of a ground theory that the tags of ``goals`` depend on.

    Closed under rule bodies, conflicting literals and (with modal conversion)
    the obligation behind each permission, so conclusions for the goals are
    the same as in the whole theory.
    """
    by_head = theory.rules_by_head
    seen = set()
    todo = list(goals)
    while todo:
        q = todo.pop()
        if q in seen:
            continue
        seen.add(q)
        related = [q, *conflict_set(q)]
        if theory.modal_conversion:
            related += [l.with_modality(Modality.OBL) for l in related if l.modality is Modality.PERM]
        for lit in related:
            if lit not in seen:
                todo.append(lit)
            for r in by_head.get(lit, ()):
                todo.extend(b for b in r.body if b not in seen)
    rules = tuple(r for r in theory.rules if r.head in seen)
    labels = {r.label for r in rules}
    sup = frozenset((w, l) for w, l in theory.superiority if w in labels and l in labels)
    return Theory._unchecked(theory.facts, rules, sup, theory.modal_conversion)


def compute_conclusions(theory: Theory) -> ConclusionSet:
    p = _Prepared(theory)
    pd, md, pp, mp = _fixpoint(p)

    def status(q, plus, minus):
        if q in plus:
            return Status.PROVED
        if q in minus:
            return Status.DISPROVED
        return Status.UNDETERMINED

    return ConclusionSet({q: (status(q, pd, md), status(q, pp, mp)) for q in p.order})


def query(conclusions: ConclusionSet, tag: ProofTag, lit: ModalLiteral) -> bool:
    idx = 0 if tag.strength is Strength.DELTA else 1
    want = Status.PROVED if tag.polarity is Polarity.PLUS else Status.DISPROVED
    return conclusions[lit][idx] is want


def incoherent_pairs(conclusions: ConclusionSet) -> List[Tuple[ModalLiteral, ModalLiteral, str]]:
    """Conflicting literals that are both defeasibly proved.

    Each pair is tagged ``"strict"`` when both sides are also definitely
    proved (the facts/strict rules themselves clash) and ``"defeasible"``
    otherwise.
    """
    out = []
    for lit, (_, part) in conclusions.sorted_items():
        if part is not Status.PROVED:
            continue
        for other in sorted(conflict_set(lit), key=str):
            if str(other) <= str(lit) or conclusions.partial(other) is not Status.PROVED:
                continue
            both_strict = (conclusions.delta(lit) is Status.PROVED
                           and conclusions.delta(other) is Status.PROVED)
            out.append((lit, other, "strict" if both_strict else "defeasible"))
    return out


def is_coherent(conclusions: ConclusionSet) -> bool:
    return not incoherent_pairs(conclusions)


@dataclass(frozen=True)
class RuleStatus:
    label: str
    status: str  # "applicable" | "discarded" | "undetermined"
    beaten_by: Tuple[str, ...] = ()


@dataclass(frozen=True)
class LiteralProof:
    literal: ModalLiteral
    delta: Status
    partial: Status
    supporting: Tuple[RuleStatus, ...]
    attacking: Tuple[RuleStatus, ...]


def derivations(theory: Theory, conclusions: ConclusionSet,
                literals: Iterable[ModalLiteral]) -> List[LiteralProof]:
    """Rules for and against each literal, with the superiority checks made."""
    p = _Prepared(theory)

    def rule_status(r: Rule) -> str:
        tags = [conclusions.partial(b) for b in r.body]
        if all(t is Status.PROVED for t in tags):
            return "applicable"
        if any(t is Status.DISPROVED for t in tags):
            return "discarded"
        return "undetermined"

    out = []
    for q in literals:
        support = p.supportive.get(q, [])
        supp = tuple(RuleStatus(r.label, rule_status(r)) for r in p.any_rule.get(q, []))
        attacks = []
        for c in sorted(conflict_set(q), key=str):
            for s in p.any_rule.get(c, []):
                beaten = tuple(t.label for t in support
                               if (t.label, s.label) in p.sup and rule_status(t) == "applicable")
                attacks.append(RuleStatus(s.label, rule_status(s), beaten))
        delta, partial = conclusions[q]
        out.append(LiteralProof(q, delta, partial, supp, tuple(attacks)))
    return out
