from __future__ import annotations

import itertools

from .terms import Rule, Theory, TheoryError


class UnsafeRuleError(TheoryError):
    def __init__(self, label: str):
        super().__init__(f"rule {label} is unsafe: a head variable does not occur in its body")
        self.label = label


def instance_label(label: str, binding: dict) -> str:
    """``r1@X=a+Y=b``; variables in name order."""
    parts = "+".join(f"{v.name}={binding[v]}" for v in sorted(binding, key=lambda v: v.name))
    return f"{label}@{parts}"


def ground_rule(rule: Rule, constants) -> list:
    variables = sorted(rule.variables(), key=lambda v: v.name)
    if not variables:
        return [rule]
    out = []
    for values in itertools.product(constants, repeat=len(variables)):
        binding = dict(zip(variables, values))
        out.append(Rule(instance_label(rule.label, binding), rule.kind, rule.mode,
                        tuple(b.substitute(binding) for b in rule.body),
                        rule.head.substitute(binding), rule.span))
    return out


def ground_theory(theory: Theory, extra_constants=()) -> Theory:
    """Instantiate every rule over the active domain of ``theory``.

    Superiority between non-ground rules carries over to every pair of their
    instances.
    """
    for r in theory.rules:
        if not r.is_safe:
            raise UnsafeRuleError(r.label)
    if theory.is_ground:
        return theory
    constants = sorted(theory.constants() | set(extra_constants))
    rules = []
    instances: dict = {}
    for r in theory.rules:
        ground = ground_rule(r, constants)
        instances[r.label] = [g.label for g in ground]
        rules.extend(ground)
    superiority = {
        (w, l)
        for winner, loser in theory.superiority
        for w in instances[winner]
        for l in instances[loser]
    }
    return Theory(theory.facts, tuple(rules), frozenset(superiority), theory.modal_conversion)
