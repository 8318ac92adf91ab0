"""Ground modal defeasible logic: syntax, grounding and proof tags."""

from .grounding import UnsafeRuleError, ground_theory
from .reasoner import (
    MINUS_DELTA,
    MINUS_PARTIAL,
    PLUS_DELTA,
    PLUS_PARTIAL,
    ConclusionSet,
    LiteralProof,
    Polarity,
    ProofTag,
    RuleStatus,
    Status,
    Strength,
    compute_conclusions,
    conversion_rules,
    derivations,
    incoherent_pairs,
    is_coherent,
    query,
    relevant_subtheory,
)
from .terms import (
    Atom,
    Literal,
    Modality,
    ModalLiteral,
    Rule,
    RuleKind,
    Theory,
    TheoryError,
    Var,
    conflict_set,
)

__all__ = [
    "Atom", "Literal", "Modality", "ModalLiteral", "Rule", "RuleKind", "Theory",
    "TheoryError", "Var", "conflict_set", "ground_theory", "UnsafeRuleError",
    "ConclusionSet", "Status", "ProofTag", "Polarity", "Strength", "PLUS_DELTA",
    "MINUS_DELTA", "PLUS_PARTIAL", "MINUS_PARTIAL", "compute_conclusions", "query",
    "is_coherent", "incoherent_pairs", "conversion_rules", "derivations",
    "LiteralProof", "RuleStatus", "relevant_subtheory",
]
