"""Seeded generators for randomized tests."""

from __future__ import annotations

import random
import string

from tdu.logic import Modality, ModalLiteral, Rule, RuleKind, Theory, conflict_set
from tdu.tduo import (Actor, Condition, DataItem, DeonticOperator, Dimension, EntityAttribute,
                      EntityId, EntityMetadata, PolicyRule, UsagePolicy)

MODES = (Modality.FACT, Modality.OBL, Modality.PERM)
KINDS = (RuleKind.STRICT, RuleKind.DEFEASIBLE, RuleKind.DEFEASIBLE, RuleKind.DEFEASIBLE,
         RuleKind.DEFEATER)


def _lit(rng: random.Random, atom: str, modality=None) -> ModalLiteral:
    return ModalLiteral.of(atom, modality=modality or rng.choice(MODES), negated=rng.random() < 0.4)


def random_theory(rng: random.Random, *, max_atoms: int = 8, max_rules: int = 15,
                  max_sup: int = 5, modal_conversion: bool = False) -> Theory:
    """Propositional theory whose atom dependency graph and superiority are acyclic.

    A rule for atom ``p<i>`` only has body atoms ``p<j>`` with ``j < i``.
    Many heads are chosen to attack an earlier head, and superiority pairs
    (ordered by a random ranking of the rules) mostly join such rivals.
    """
    atoms = [f"p{i}" for i in range(rng.randint(1, max_atoms))]
    facts = set()
    for _ in range(rng.randint(0, 3)):
        modality = Modality.FACT if rng.random() < 0.7 else rng.choice(MODES)
        facts.add(_lit(rng, rng.choice(atoms), modality))
    rules = []
    for n in range(rng.randint(0, max_rules)):
        if rules and rng.random() < 0.4:
            # attack an earlier head
            target = rng.choice(rules).head
            head = rng.choice(sorted(conflict_set(target), key=str))
            i = atoms.index(head.atom.predicate)
        else:
            i = rng.randrange(len(atoms))
            head = _lit(rng, atoms[i])
        body = tuple(_lit(rng, atoms[j]) for j in rng.sample(range(i), min(i, rng.randint(0, 3))))
        rules.append(Rule(f"r{n}", rng.choice(KINDS), head.modality, body, head))
    sup = set()
    if len(rules) >= 2:
        rank = {r.label: k for k, r in enumerate(rng.sample(rules, len(rules)))}
        clashing = [(a, b) for a in rules for b in rules if b.head in conflict_set(a.head)]
        for _ in range(rng.randint(0, max_sup)):
            if clashing and rng.random() < 0.8:
                a, b = rng.choice(clashing)
            else:
                a, b = rng.sample(rules, 2)
            w, l = (a, b) if rank[a.label] < rank[b.label] else (b, a)
            sup.add((w.label, l.label))
    return Theory(frozenset(facts), tuple(rules), frozenset(sup), modal_conversion)


# -- TDUO documents ---------------------------------------------------------------

_ID_CHARS = string.ascii_letters + string.digits + "-_:."
_TEXT_CHARS = string.ascii_letters + string.digits + " -_.,:/()&<>'\"éß"


def _ident(rng: random.Random, lo: int = 1, hi: int = 12) -> str:
    return "".join(rng.choice(_ID_CHARS) for _ in range(rng.randint(lo, hi)))


def _text(rng: random.Random) -> str:
    raw = "".join(rng.choice(_TEXT_CHARS) for _ in range(rng.randint(0, 16)))
    # leading/trailing blanks are not significant in the XML encoding
    return raw.strip()


def _metadata(rng: random.Random) -> EntityMetadata:
    return EntityMetadata(_ident(rng), _ident(rng), _text(rng))


def random_data_item(rng: random.Random) -> DataItem:
    attrs = tuple(
        EntityAttribute(_ident(rng), _ident(rng), _text(rng),
                        tuple(_metadata(rng) for _ in range(rng.randint(1, 3))))
        for _ in range(rng.randint(0, 4)))
    domain = (tuple(_metadata(rng) for _ in range(rng.randint(1, 3)))
              if rng.random() < 0.5 else None)
    name = _ident(rng) if rng.random() < 0.5 else None
    return DataItem(EntityId(_ident(rng), _ident(rng)), attrs, name, domain)


def random_condition(rng: random.Random) -> Condition:
    while True:
        parts = {}
        for field, dim in (("temporality", Dimension.TEMPORAL), ("spatiality", Dimension.SPATIAL),
                           ("abstraction", Dimension.ABSTRACTION), ("purpose", Dimension.PURPOSE)):
            if rng.random() < 0.6:
                values = dim.values
                parts[field] = tuple(rng.sample(values, rng.randint(1, min(3, len(values)))))
        if rng.random() < 0.8:
            parts["actor"] = tuple(rng.sample(list(Actor), rng.randint(1, 3)))
        if parts:
            return Condition(**parts)


def random_policy(rng: random.Random) -> UsagePolicy:
    rules = tuple(PolicyRule(rng.choice(list(DeonticOperator)), random_condition(rng))
                  for _ in range(rng.randint(0, 4)))
    return UsagePolicy("urn:" + _ident(rng), rules)
