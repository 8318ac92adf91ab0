"""Syntax of ground/non-ground modal defeasible theories."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, Iterator, Optional, Tuple, Union


class TheoryError(ValueError):
    """Raised when a theory violates a structural invariant."""


class Modality(str, Enum):
    FACT = "Fact"
    OBL = "Obl"
    PERM = "Perm"

    @property
    def prefix(self) -> str:
        return {"Fact": "", "Obl": "[O]", "Perm": "[P]"}[self.value]


class RuleKind(str, Enum):
    STRICT = "Strict"
    DEFEASIBLE = "Defeasible"
    DEFEATER = "Defeater"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[str, Var]


def _term_str(term: Term) -> str:
    return term.name if isinstance(term, Var) else term


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: Tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        if not self.predicate:
            raise TheoryError("atom predicate must be nonempty")
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "_hash", hash((self.predicate, self.args)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> Iterator[Var]:
        return (a for a in self.args if isinstance(a, Var))

    def constants(self) -> Iterator[str]:
        return (a for a in self.args if not isinstance(a, Var))

    def substitute(self, binding: dict) -> "Atom":
        return Atom(self.predicate, tuple(binding.get(a, a) if isinstance(a, Var) else a for a in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(_term_str(a) for a in self.args)})"


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.atom, self.negated)))

    def __hash__(self) -> int:
        return self._hash

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.negated)

    def __str__(self) -> str:
        return ("~" if self.negated else "") + str(self.atom)


@dataclass(frozen=True)
class ModalLiteral:
    modality: Modality
    literal: Literal

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.modality, self.literal)))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def of(cls, predicate: str, *args: Term, modality: Modality = Modality.FACT,
           negated: bool = False) -> "ModalLiteral":
        return cls(modality, Literal(Atom(predicate, tuple(args)), negated))

    @property
    def atom(self) -> Atom:
        return self.literal.atom

    @property
    def is_ground(self) -> bool:
        return not any(True for _ in self.atom.variables())

    def with_modality(self, modality: Modality) -> "ModalLiteral":
        return ModalLiteral(modality, self.literal)

    def complement(self) -> "ModalLiteral":
        return ModalLiteral(self.modality, self.literal.complement())

    def substitute(self, binding: dict) -> "ModalLiteral":
        return ModalLiteral(self.modality, Literal(self.atom.substitute(binding), self.literal.negated))

    def __str__(self) -> str:
        return self.modality.prefix + str(self.literal)


def conflict_set(lit: ModalLiteral) -> frozenset:
    """Literals that attack ``lit``.

    Perm p and Perm ~p are compatible; an obligation is attacked by both the
    contrary obligation and the contrary permission.
    """
    neg = lit.literal.complement()
    if lit.modality is Modality.FACT:
        return frozenset({ModalLiteral(Modality.FACT, neg)})
    if lit.modality is Modality.OBL:
        return frozenset({ModalLiteral(Modality.OBL, neg), ModalLiteral(Modality.PERM, neg)})
    return frozenset({ModalLiteral(Modality.OBL, neg)})


@dataclass(frozen=True)
class Rule:
    label: str
    kind: RuleKind
    mode: Modality
    body: Tuple[ModalLiteral, ...]
    head: ModalLiteral
    # (line, column) in the source text, when parsed
    span: Optional[Tuple[int, int]] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.label:
            raise TheoryError("rule label must be nonempty")
        if not isinstance(self.body, tuple):
            object.__setattr__(self, "body", tuple(self.body))
        if self.head.modality is not self.mode:
            raise TheoryError(
                f"rule {self.label}: head modality {self.head.modality.value} "
                f"differs from rule mode {self.mode.value}")

    @property
    def is_ground(self) -> bool:
        return self.head.is_ground and all(b.is_ground for b in self.body)

    def variables(self) -> set:
        out = set(self.head.atom.variables())
        for b in self.body:
            out.update(b.atom.variables())
        return out

    @property
    def is_safe(self) -> bool:
        body_vars = set()
        for b in self.body:
            body_vars.update(b.atom.variables())
        return set(self.head.atom.variables()) <= body_vars

    def __str__(self) -> str:
        arrow = {RuleKind.STRICT: "->", RuleKind.DEFEASIBLE: "=>", RuleKind.DEFEATER: "~>"}[self.kind]
        if self.mode is Modality.OBL:
            arrow += "o"
        elif self.mode is Modality.PERM:
            arrow += "p"
        body = ", ".join(str(b) for b in self.body)
        head = str(self.head.literal)
        return f"{self.label}: {body} {arrow} {head}." if body else f"{self.label}: {arrow} {head}."


@dataclass(frozen=True)
class Theory:
    facts: frozenset = frozenset()
    rules: Tuple[Rule, ...] = ()
    superiority: frozenset = frozenset()
    modal_conversion: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "facts", frozenset(self.facts))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "superiority", frozenset(tuple(p) for p in self.superiority))
        self._validate()

    def _validate(self) -> None:
        labels = set()
        for r in self.rules:
            if r.label in labels:
                raise TheoryError(f"duplicate rule label {r.label!r}")
            labels.add(r.label)
        for winner, loser in self.superiority:
            if winner == loser:
                raise TheoryError(f"superiority must be irreflexive: {winner} > {loser}")
            for lab in (winner, loser):
                if lab not in labels:
                    raise TheoryError(f"superiority references unknown rule {lab!r}")
        for f in self.facts:
            if not f.is_ground:
                raise TheoryError(f"fact {f} is not ground")
        arities: dict = {}
        for lit in self.literals():
            seen = arities.setdefault(lit.atom.predicate, lit.atom.arity)
            if seen != lit.atom.arity:
                raise TheoryError(
                    f"predicate {lit.atom.predicate} used with arities {seen} and {lit.atom.arity}")

    @classmethod
    def _unchecked(cls, facts, rules, superiority, modal_conversion=True) -> "Theory":
        """Build without re-validating; for theories assembled from validated parts."""
        t = object.__new__(cls)
        object.__setattr__(t, "facts", frozenset(facts))
        object.__setattr__(t, "rules", tuple(rules))
        object.__setattr__(t, "superiority", frozenset(superiority))
        object.__setattr__(t, "modal_conversion", modal_conversion)
        return t

    @cached_property
    def rules_by_head(self) -> Dict[ModalLiteral, Tuple[Rule, ...]]:
        index: Dict[ModalLiteral, list] = {}
        for r in self.rules:
            index.setdefault(r.head, []).append(r)
        return {k: tuple(v) for k, v in index.items()}

    def literals(self) -> Iterator[ModalLiteral]:
        yield from self.facts
        for r in self.rules:
            yield r.head
            yield from r.body

    def constants(self) -> set:
        out = set()
        for lit in self.literals():
            out.update(lit.atom.constants())
        return out

    @property
    def is_ground(self) -> bool:
        return all(r.is_ground for r in self.rules)

    def rule(self, label: str) -> Rule:
        for r in self.rules:
            if r.label == label:
                return r
        raise KeyError(label)

    def extend(self, facts: Iterable[ModalLiteral] = (), rules: Iterable[Rule] = (),
               superiority: Iterable[Tuple[str, str]] = ()) -> "Theory":
        return Theory(self.facts | frozenset(facts), self.rules + tuple(rules),
                      self.superiority | frozenset(superiority), self.modal_conversion)
