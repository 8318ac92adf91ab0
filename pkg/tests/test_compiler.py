from __future__ import annotations

import pytest

from tdu.compiler import (CompileError, DSLSyntaxError, compile_policies, compile_policy,
                          detect_conflicts, format_theory, merge_theories, parse_rule, parse_theory)
from tdu.logic import (Modality, ModalLiteral, RuleKind, Status, compute_conclusions, ground_theory)
from tdu.scenario import (COMMERCIAL_POLICY, DATA_OWNER_POLICY, MUNICIPAL_POLICY, POLICIES,
                          subject_facts)
from tdu.tduo import (Condition, DeonticOperator, Dimension, PolicyRule, UsagePolicy, subsumes)
from tdu.tduo.scopes import Actor

MA_RULES = [
    "urn_tdu_policy_municipal_authority_0: MA(X) =>p TemporalScope(X, hourly).",
    "urn_tdu_policy_municipal_authority_1: MA(X) =>p SpatialScope(X, street).",
    "urn_tdu_policy_municipal_authority_2: MA(X) =>p AbstractScope(X, aggregation).",
]


def tags_by_text(theory):
    return {str(l): v for l, v in compute_conclusions(ground_theory(theory)).items()}


class TestDSL:
    def test_paper_rule(self):
        r = parse_rule("r1c: CO(X) =>p SpatialScope(X, zone).")
        assert (r.label, r.kind, r.mode) == ("r1c", RuleKind.DEFEASIBLE, Modality.PERM)
        assert str(r.head) == "[P]SpatialScope(X, zone)"

    def test_empty_text(self):
        t = parse_theory("")
        assert not t.rules and not t.facts and not t.superiority

    def test_dangling_superiority(self):
        with pytest.raises(DSLSyntaxError) as err:
            parse_theory("r: p >")
        assert (err.value.line, err.value.column) == (1, 6)

    def test_duplicate_label_position(self):
        with pytest.raises(DSLSyntaxError, match="duplicate label 'r1'") as err:
            parse_theory("r1: a => b.\nr1: a => c.")
        assert err.value.line == 2

    def test_all_statement_forms(self):
        text = ("# owners\nfact DO(d).\nfact ~p.\nfact [O]q.\n"
                "s: DO(X) -> a(X).\nr: a(X), [P]b(X) =>o c(X).\nd: ~p ~> ~c(d).\nr > d.\n")
        t = parse_theory(text)
        assert [r.kind for r in t.rules] == [RuleKind.STRICT, RuleKind.DEFEASIBLE, RuleKind.DEFEATER]
        assert ("r", "d") in t.superiority
        assert ModalLiteral.of("q", modality=Modality.OBL) in t.facts
        assert parse_theory(format_theory(t)) == t

    def test_positions_kept(self):
        t = parse_theory("\n\n  r: => p.")
        assert t.rules[0].span == (3, 3)


class TestCompilePolicy:
    def test_municipal(self):
        t = compile_policy(MUNICIPAL_POLICY)
        defeasible = [str(r) for r in t.rules if r.kind is RuleKind.DEFEASIBLE]
        assert defeasible == MA_RULES
        expansions = {(str(r.body[0]), str(r.head)) for r in t.rules if r.kind is RuleKind.STRICT}
        assert expansions == {
            ("[P]TemporalScope(X, hourly)", f"[P]TemporalScope(X, {v})")
            for v in ("daily", "weekly", "monthly", "yearly")
        } | {("[P]SpatialScope(X, street)", "[P]SpatialScope(X, zone)"),
             ("[P]AbstractScope(X, aggregation)", "[P]AbstractScope(X, statistic)")}

    def test_owner(self):
        t = compile_policy(DATA_OWNER_POLICY)
        defeasible = [r for r in t.rules if r.kind is RuleKind.DEFEASIBLE]
        assert [str(r.head) for r in defeasible] == [
            "[P]TemporalScope(X, any)", "[P]SpatialScope(X, any)", "[P]AbstractScope(X, any)",
            "[P]PurposeScope(X, any)"]
        strict_heads = {str(r.head) for r in t.rules if r.kind is RuleKind.STRICT}
        assert len(strict_heads) == 7 + 2 + 3 + 1

    def test_empty_policy(self):
        assert compile_policy(UsagePolicy("urn:empty")).rules == ()

    def test_forbidden_is_negated_obligation(self):
        p = UsagePolicy("urn:f", (PolicyRule(DeonticOperator.FORBIDDEN, Condition(
            spatiality=("street",), actor=(Actor.COMMERCIAL_OPERATOR,))),))
        (rule,) = compile_policy(p).rules
        assert str(rule) == "urn_f_0: CO(X) =>o ~SpatialScope(X, street)."

    def test_obligation_gets_expansions(self):
        p = UsagePolicy("urn:o", (PolicyRule(DeonticOperator.OBLIGATION, Condition(
            spatiality=("street",), actor=(Actor.MUNICIPAL_AUTHORITY,))),))
        assert [str(r) for r in compile_policy(p).rules] == [
            "urn_o_0: MA(X) =>o SpatialScope(X, street).",
            "urn_o_x0: [P]SpatialScope(X, street) ->p SpatialScope(X, zone).",
        ]

    def test_actor_class_argument(self):
        p = UsagePolicy("urn:n", (PolicyRule(DeonticOperator.PERMISSION,
                                             Condition(spatiality=("zone",))),))
        with pytest.raises(CompileError, match="no Actor"):
            compile_policy(p)
        assert str(compile_policy(p, "CO").rules[0]) == "urn_n_0: CO(X) =>p SpatialScope(X, zone)."
        with pytest.raises(CompileError, match="unknown actor-class"):
            compile_policy(p, "Mayor")

    def test_deterministic_text(self):
        assert format_theory(compile_policies(POLICIES)) == format_theory(compile_policies(POLICIES))

    @pytest.mark.parametrize("policy,subject", [(DATA_OWNER_POLICY, "d"), (MUNICIPAL_POLICY, "m"),
                                                (COMMERCIAL_POLICY, "c")])
    def test_expansion_sound_and_minimal(self, policy, subject):
        """A level is permitted exactly when some granted level subsumes it."""
        t = ground_theory(compile_policy(policy).extend(facts=subject_facts()))
        c = compute_conclusions(t)
        for dim in Dimension:
            granted = [v for rule in policy.rules for d, v in rule.condition.scopes() if d is dim]
            for level in dim.values:
                lit = ModalLiteral.of(dim.predicate, subject, level, modality=Modality.PERM)
                expected = any(subsumes(g, level, dim) for g in granted)
                assert (c.partial(lit) is Status.PROVED) == expected, (dim, level)


class TestMerge:
    def test_singleton(self):
        t = compile_policy(MUNICIPAL_POLICY)
        assert merge_theories([t]) is t

    def test_all_rules_kept(self):
        parts = [compile_policy(p) for p in POLICIES]
        merged = merge_theories(parts)
        assert len(merged.rules) == sum(len(p.rules) for p in parts)

    def test_label_clash_prefixed(self):
        a = parse_theory("fact x.\nr1: x => p.\nr2: => ~p.\nr1 > r2.")
        b = parse_theory("r1: x => q.\nr3: => ~q.\nr3 > r1.")
        merged = merge_theories([a, b])
        labels = [r.label for r in merged.rules]
        assert labels == ["s0_r1", "r2", "s1_r1", "r3"]
        assert merged.superiority == {("s0_r1", "r2"), ("r3", "s1_r1")}
        # renaming by hand gives the same tags
        manual = parse_theory("fact x.\nA: x => p.\nr2: => ~p.\nB: x => q.\nr3: => ~q.\n"
                              "A > r2.\nr3 > B.")
        assert tags_by_text(merged) == tags_by_text(manual)

    def test_associative_up_to_labels(self):
        a, b, c = (compile_policy(p) for p in POLICIES)
        facts = parse_theory("fact DO(d).\nfact MA(m).\nfact CO(c).")
        left = merge_theories([merge_theories([a, b]), c, facts])
        right = merge_theories([a, merge_theories([b, c]), facts])
        assert tags_by_text(left) == tags_by_text(right)


class TestConflicts:
    def test_unordered_pair_reported(self):
        report = detect_conflicts(parse_theory("r1: =>o p.\nr2: =>p ~p."))
        assert report.pairs == (("r1", "r2"),)
        assert "r1 vs r2" in str(report)

    def test_ordered_pair_resolved(self):
        assert detect_conflicts(parse_theory("r1: =>o p.\nr2: =>p ~p.\nr1 > r2.")).empty

    def test_municipal_alone(self):
        assert str(detect_conflicts(compile_policy(MUNICIPAL_POLICY))) == "no conflicts"

    def test_merged_scenario(self):
        assert detect_conflicts(compile_policies(POLICIES)).empty

    def test_forbidden_vs_permission_detected(self):
        p = UsagePolicy("urn:f", (PolicyRule(DeonticOperator.FORBIDDEN, Condition(
            spatiality=("street",), actor=(Actor.MUNICIPAL_AUTHORITY,))),))
        report = detect_conflicts(compile_policies([MUNICIPAL_POLICY, p]))
        assert report.source_pairs == (("urn_tdu_policy_municipal_authority_1", "urn_f_0"),)
