"""Policy compiler: TDUO usage policies and rule text into defeasible theories."""

from .dsl import DSLSyntaxError, format_theory, parse_rule, parse_theory
from .policy import (
    CompileError,
    ConflictReport,
    actor_literal,
    compile_policies,
    compile_policy,
    detect_conflicts,
    merge_theories,
    policy_slug,
    scope_literal,
)

__all__ = [
    "DSLSyntaxError", "format_theory", "parse_rule", "parse_theory", "CompileError",
    "ConflictReport", "actor_literal", "compile_policies", "compile_policy",
    "detect_conflicts", "merge_theories", "policy_slug", "scope_literal",
]
