"""
Parser for the specification formula grammar.

    expr    := imp ('<->' imp)*
    imp     := or ('->' imp)?
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | QUANT IDENT (',' IDENT)* '.' expr | primary
    primary := '(' expr ')' | 'true' | 'false' | 'in' '(' IDENT ',' term ')'
             | IDENT 'sub' IDENT | IDENT '=' '{' ['0'] '}' | term REL term | MACRO
    term    := IDENT ['+' NUM] | NUM
    QUANT   := all | ex | allset | exset | atmost1 | unique
    REL     := < | > | = | <=

Quantifier scope extends as far right as possible. Derived forms are
desugared while parsing, so the result is already in normal form.
"""
import logging
import re
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Set, Tuple

from ..core.exceptions import FormulaSyntaxError, RoleConflictError, UnboundVariableError
from ..models.formula import (
    And,
    Equal,
    Exists,
    FALSE,
    Formula,
    Less,
    Member,
    Not,
    Span,
    TRUE,
    at_most_one,
    at_offset,
    at_position,
    disj,
    exists_unique,
    free_vars,
    iff,
    implies,
    is_empty,
    is_zero_singleton,
    neg,
    normalize,
    set_equal,
    subset,
)

logger = logging.getLogger(__name__)

KEYWORDS = {"all", "ex", "allset", "exset", "atmost1", "unique", "in", "sub", "true", "false"}
SET_BINDERS = {"allset", "exset"}
QUANTIFIERS = {"all", "ex", "allset", "exset", "atmost1", "unique"}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op><->|->|<=|[~&|().,<>=+{}])|(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9']*))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # op, num, ident, keyword, end
    text: str
    line: int
    column: int

    @property
    def span(self) -> Span:
        return Span(self.line, self.column)


@dataclass(frozen=True)
class Term:
    """A first-order variable plus offset, or a numeral"""
    name: Optional[str]
    offset: int
    token: Token


def tokenize(text: str, line: int = 1, column: int = 1) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    cur_line, line_start = line, -(column - 1)
    while pos < len(text):
        if text[pos] in " \t\r":
            pos += 1
            continue
        if text[pos] == "\n":
            cur_line += 1
            pos += 1
            line_start = pos
            continue
        match = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if match is None or match.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", cur_line, col)
        start = match.start(match.lastgroup)
        col = start - line_start + 1
        kind = match.lastgroup
        value = match.group(kind)
        if kind == "ident" and value in KEYWORDS:
            kind = "keyword"
        tokens.append(Token(kind, value, cur_line, col))
        pos = match.end()
    tokens.append(Token("end", "", cur_line, pos - line_start + 1))
    return tokens


def _second_order_names(tokens: List[Token]) -> Set[str]:
    """Names the token stream uses as sets."""
    names: Set[str] = set()
    for i, tok in enumerate(tokens):
        if tok.text == "in" and i + 2 < len(tokens) and tokens[i + 1].text == "(":
            names.add(tokens[i + 2].text)
        elif tok.text in SET_BINDERS:
            j = i + 1
            while j < len(tokens) and tokens[j].kind == "ident":
                names.add(tokens[j].text)
                if tokens[j + 1].text != ",":
                    break
                j += 2
        elif tok.text == "sub" and 0 < i < len(tokens) - 1:
            names.add(tokens[i - 1].text)
            names.add(tokens[i + 1].text)
        elif tok.text == "=" and i + 1 < len(tokens) and tokens[i + 1].text == "{" and i > 0:
            names.add(tokens[i - 1].text)
    return names


class FormulaParser:
    """Recursive-descent parser producing desugared formulas"""

    def __init__(
        self,
        text: str,
        macros: Optional[Dict[str, Formula]] = None,
        set_names: Iterable[str] = (),
        line: int = 1,
        column: int = 1,
    ):
        self.tokens = tokenize(text, line, column)
        self.pos = 0
        self.macros = dict(macros or {})
        self.set_names = set(set_names) | _second_order_names(self.tokens)
        self.term_names: Set[str] = set()

    # token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.current
        if tok.text != text:
            found = tok.text or "end of input"
            raise FormulaSyntaxError(f"expected '{text}' but found '{found}'", tok.line, tok.column)
        return self.advance()

    def error(self, message: str, tok: Optional[Token] = None) -> FormulaSyntaxError:
        tok = tok or self.current
        return FormulaSyntaxError(message, tok.line, tok.column)

    # grammar

    def parse(self) -> Formula:
        f = self.parse_iff()
        if self.current.kind != "end":
            raise self.error(f"unexpected '{self.current.text}'")
        overlap = self.set_names & self.term_names
        if overlap:
            raise RoleConflictError(
                f"used both as first-order and second-order variable: {', '.join(sorted(overlap))}"
            )
        return f

    def parse_iff(self) -> Formula:
        left = self.parse_implies()
        while self.current.text == "<->":
            self.advance()
            left = iff(left, self.parse_implies())
        return left

    def parse_implies(self) -> Formula:
        left = self.parse_or()
        if self.current.text == "->":
            self.advance()
            return implies(left, self.parse_implies())
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.current.text == "|":
            self.advance()
            left = disj(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_unary()
        while self.current.text == "&":
            self.advance()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> Formula:
        tok = self.current
        if tok.text == "~":
            self.advance()
            return Not(self.parse_unary())
        if tok.kind == "keyword" and tok.text in QUANTIFIERS:
            return self.parse_quantifier()
        return self.parse_primary()

    def parse_quantifier(self) -> Formula:
        keyword = self.advance()
        second_order = keyword.text in SET_BINDERS
        binders: List[Token] = []
        while True:
            tok = self.current
            if tok.kind != "ident":
                raise self.error("expected a variable name after quantifier")
            self.advance()
            if second_order:
                self.set_names.add(tok.text)
            else:
                self.term_names.add(tok.text)
            binders.append(tok)
            if self.current.text != ",":
                break
            self.advance()
        self.expect(".")
        body = self.parse_iff()
        for tok in reversed(binders):
            body = self._bind(keyword.text, tok, body)
        return body

    def _bind(self, keyword: str, tok: Token, body: Formula) -> Formula:
        name = tok.text
        if keyword in ("ex", "exset"):
            return Exists(name, body, keyword == "exset", tok.span)
        if keyword in ("all", "allset"):
            return neg(Exists(name, neg(body), keyword == "allset", tok.span))
        if keyword == "atmost1":
            return at_most_one(name, body)
        return exists_unique(name, body)

    def parse_primary(self) -> Formula:
        tok = self.current
        if tok.text == "(":
            self.advance()
            f = self.parse_iff()
            self.expect(")")
            return f
        if tok.text == "true":
            self.advance()
            return TRUE
        if tok.text == "false":
            self.advance()
            return FALSE
        if tok.text == "in":
            return self.parse_membership()
        if tok.kind == "ident" and self.peek().text == "sub":
            left = self.advance()
            self.advance()
            right = self.current
            if right.kind != "ident":
                raise self.error("expected a set variable after 'sub'")
            self.advance()
            return subset(left.text, right.text)
        if tok.kind == "ident" and self.peek().text == "=" and self.peek(2).text == "{":
            return self.parse_set_literal()
        if tok.kind == "ident" and tok.text in self.macros and self.peek().text not in ("<", ">", "=", "<=", "+"):
            self.advance()
            return self.macros[tok.text]
        if tok.kind in ("ident", "num"):
            return self.parse_relation()
        raise self.error(f"unexpected '{tok.text or 'end of input'}'")

    def parse_membership(self) -> Formula:
        start = self.expect("in")
        self.expect("(")
        var = self.current
        if var.kind != "ident":
            raise self.error("expected a set variable")
        self.advance()
        self.expect(",")
        term = self.parse_term()
        self.expect(")")
        return self._with_term(term, lambda t: Member(var.text, t, start.span))

    def parse_set_literal(self) -> Formula:
        var = self.advance()
        self.expect("=")
        self.expect("{")
        if self.current.text == "}":
            self.advance()
            return is_empty(var.text)
        zero = self.current
        if zero.text != "0":
            raise self.error("only the set literals {} and {0} are supported")
        self.advance()
        self.expect("}")
        return is_zero_singleton(var.text)

    def parse_relation(self) -> Formula:
        left = self.parse_term()
        op = self.current
        if op.text not in ("<", ">", "=", "<="):
            raise self.error("expected a relation '<', '>', '=' or '<='")
        self.advance()
        right = self.parse_term()

        if op.text == "=" and self._is_set_term(left) and self._is_set_term(right):
            return set_equal(left.name, right.name)
        if op.text == "=" and (self._is_set_term(left) or self._is_set_term(right)):
            raise RoleConflictError(
                f"line {op.line}, column {op.column}: '=' between a set and a position"
            )
        self._note_term(left)
        self._note_term(right)

        def build(a: str, b: str) -> Formula:
            if op.text == "<":
                return Less(a, b, op.span)
            if op.text == ">":
                return Less(b, a, op.span)
            if op.text == "<=":
                return neg(Less(b, a, op.span))
            return Equal(a, b, op.span)

        return self._with_term(left, lambda a: self._with_term(right, lambda b: build(a, b)))

    def parse_term(self) -> Term:
        tok = self.current
        if tok.kind == "num":
            self.advance()
            return Term(None, int(tok.text), tok)
        if tok.kind != "ident":
            raise self.error("expected a position term")
        self.advance()
        offset = 0
        if self.current.text == "+":
            self.advance()
            num = self.current
            if num.kind != "num":
                raise self.error("expected a numeral after '+'")
            self.advance()
            offset = int(num.text)
        return Term(tok.text, offset, tok)

    def _is_set_term(self, term: Term) -> bool:
        return term.name is not None and term.offset == 0 and term.name in self.set_names

    def _note_term(self, term: Term) -> None:
        if term.name is not None:
            if term.name in self.set_names:
                raise RoleConflictError(
                    f"line {term.token.line}, column {term.token.column}: "
                    f"set variable '{term.name}' used as a position"
                )
            self.term_names.add(term.name)

    def _with_term(self, term: Term, body: Callable[[str], Formula]) -> Formula:
        self._note_term(term)
        if term.name is None:
            return at_position(term.offset, body)
        return at_offset(term.name, term.offset, body)


def parse(
    text: str,
    declared: Optional[Iterable[str]] = None,
    macros: Optional[Dict[str, Formula]] = None,
    line: int = 1,
    column: int = 1,
) -> Formula:
    """
    Parse formula text into a desugared, shadow-free formula.

    With `declared` given, every free variable must be one of the declared
    names (all of which are treated as sets).
    """
    declared_names = list(declared) if declared is not None else []
    parser = FormulaParser(text, macros=macros, set_names=declared_names, line=line, column=column)
    formula = parser.parse()
    if declared is not None:
        first_order, second_order = free_vars(formula)
        for name in sorted(first_order | second_order):
            if name not in declared_names:
                raise UnboundVariableError(name, *_first_occurrence(parser.tokens, name))
    result = normalize(formula)
    logger.debug(f"Parsed formula with free variables {sorted(free_vars(result)[1])}")
    return result


def _first_occurrence(tokens: List[Token], name: str) -> Tuple[Optional[int], Optional[int]]:
    for tok in tokens:
        if tok.kind == "ident" and tok.text == name:
            return tok.line, tok.column
    return None, None
