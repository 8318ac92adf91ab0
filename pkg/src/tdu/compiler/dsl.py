"""Textual theory language.

    # comment
    fact CO(acme).
    fact [P]SpatialScope(acme, zone).
    r1c: CO(X) =>p SpatialScope(X, zone).
    x1: [P]SpatialScope(X, street) ->p SpatialScope(X, zone).
    d1: Noisy(X) ~>o ~Share(X).
    r1c > r2c.

Identifiers starting with an upper-case letter or ``_`` inside argument lists
are variables.  Arrows are ``->`` (strict), ``=>`` (defeasible) and ``~>``
(defeater), optionally suffixed with ``o``/``p`` to give the head its mode; a
head may instead carry an explicit ``[O]``/``[P]`` prefix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List

from ..logic.terms import (
    Atom,
    Literal,
    Modality,
    ModalLiteral,
    Rule,
    RuleKind,
    Theory,
    TheoryError,
    Var,
)


class DSLSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


_NAME = r"[A-Za-z0-9_]+"
_SUFFIX = rf"@[A-Za-z_][A-Za-z0-9_]*={_NAME}(?:\+[A-Za-z_][A-Za-z0-9_]*={_NAME})*"

_TOKEN_SPEC = [
    ("SKIP", r"[ \t\r]+|#[^\n]*"),
    ("NEWLINE", r"\n"),
    ("MODAL", r"\[[OP]\]"),
    ("ARROW", r"(?:->|=>|~>)[op]?(?![A-Za-z0-9_])"),
    ("TILDE", r"~"),
    ("IDENT", rf"{_NAME}(?:{_SUFFIX})?"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("COLON", r":"),
    ("DOT", r"\."),
    ("GT", r">"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _TOKEN_SPEC))

_ARROW_KIND = {"->": RuleKind.STRICT, "=>": RuleKind.DEFEASIBLE, "~>": RuleKind.DEFEATER}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "NEWLINE":
            line += 1
            line_start = m.end()
        elif kind != "SKIP":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "EOF" else repr(tok.text)


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def error(self, expected: str) -> DSLSyntaxError:
        return DSLSyntaxError(f"expected {expected}, found {_describe(self.tok)}",
                              self.tok.line, self.tok.column)

    def expect(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            raise self.error(what)
        return self.advance()

    def parse(self):
        facts, rules, sup = [], [], []
        seen = {}
        while self.tok.kind != "EOF":
            start = self.tok
            if start.kind != "IDENT":
                raise self.error("a statement")
            nxt = self.peek()
            if start.text == "fact" and nxt.kind not in ("COLON", "GT"):
                self.advance()
                lit = self.modal_literal()
                if not lit.is_ground:
                    raise DSLSyntaxError(f"fact {lit} is not ground", start.line, start.column)
                facts.append(lit)
            elif nxt.kind == "COLON":
                rule = self.rule()
                if rule.label in seen:
                    line, col = seen[rule.label]
                    raise DSLSyntaxError(
                        f"duplicate label {rule.label!r} (first defined at line {line}, column {col})",
                        start.line, start.column)
                seen[rule.label] = (start.line, start.column)
                rules.append(rule)
            elif nxt.kind == "GT":
                self.advance()
                self.advance()
                loser = self.expect("IDENT", "a rule label after '>'")
                sup.append((start.text, loser.text, start))
            else:
                self.advance()
                raise self.error("':' or '>' after a label")
            self.expect("DOT", "'.' to end the statement")
        for winner, loser, tok in sup:
            for lab in (winner, loser):
                if lab not in seen:
                    raise DSLSyntaxError(f"superiority references unknown rule {lab!r}",
                                         tok.line, tok.column)
            if winner == loser:
                raise DSLSyntaxError(f"superiority must be irreflexive ({winner} > {loser})",
                                     tok.line, tok.column)
        try:
            return Theory(frozenset(facts), tuple(rules), frozenset((w, l) for w, l, _ in sup))
        except TheoryError as exc:
            raise DSLSyntaxError(str(exc), 1, 1) from exc

    def rule(self) -> Rule:
        label = self.advance()
        self.expect("COLON", "':'")
        body = []
        if self.tok.kind != "ARROW":
            body.append(self.modal_literal())
            while self.tok.kind == "COMMA":
                self.advance()
                body.append(self.modal_literal())
        arrow = self.expect("ARROW", "',' or an arrow ('->', '=>', '~>')")
        kind = _ARROW_KIND[arrow.text[:2]]
        suffix = arrow.text[2:]
        head_tok = self.tok
        head = self.modal_literal()
        if suffix:
            mode = Modality.OBL if suffix == "o" else Modality.PERM
            if head.modality is not Modality.FACT and head.modality is not mode:
                raise DSLSyntaxError(f"head prefix contradicts arrow mode {arrow.text!r}",
                                     head_tok.line, head_tok.column)
            head = head.with_modality(mode)
        return Rule(label.text, kind, head.modality, tuple(body), head,
                    span=(label.line, label.column))

    def modal_literal(self) -> ModalLiteral:
        modality = Modality.FACT
        if self.tok.kind == "MODAL":
            modality = Modality.OBL if self.advance().text == "[O]" else Modality.PERM
        negated = False
        if self.tok.kind == "TILDE":
            self.advance()
            negated = True
        pred = self.expect("IDENT", "a predicate name")
        if "@" in pred.text:
            raise DSLSyntaxError(f"invalid predicate name {pred.text!r}", pred.line, pred.column)
        args = []
        if self.tok.kind == "LPAREN":
            self.advance()
            args.append(self.term())
            while self.tok.kind == "COMMA":
                self.advance()
                args.append(self.term())
            self.expect("RPAREN", "',' or ')'")
        return ModalLiteral(modality, Literal(Atom(pred.text, tuple(args)), negated))

    def term(self):
        tok = self.expect("IDENT", "a term")
        if "@" in tok.text:
            raise DSLSyntaxError(f"invalid term {tok.text!r}", tok.line, tok.column)
        if tok.text[0].isupper() or tok.text[0] == "_":
            return Var(tok.text)
        return tok.text


def parse_theory(text: str) -> Theory:
    """Parse a whole theory; empty text gives the empty theory."""
    return _Parser(text).parse()


def parse_rule(text: str) -> Rule:
    """Parse text holding exactly one rule statement."""
    theory = parse_theory(text)
    if len(theory.rules) != 1 or theory.facts or theory.superiority:
        raise DSLSyntaxError("expected exactly one rule statement", 1, 1)
    return theory.rules[0]


def format_theory(theory: Theory) -> str:
    """Canonical text: facts sorted, rules in order, superiority sorted."""
    lines = [f"fact {f}." for f in sorted(theory.facts, key=str)]
    lines += [str(r) for r in theory.rules]
    lines += [f"{w} > {l}." for w, l in sorted(theory.superiority)]
    return "\n".join(lines) + ("\n" if lines else "")


def is_constant(name: str) -> bool:
    return bool(re.fullmatch(r"[a-z0-9][A-Za-z0-9_]*", name))
