"""Recursive-descent parser for the surface/flex expression language.

Grammar (loosest to tightest)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "u" | "v" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"

``^`` is right associative and binds tighter than unary minus, so ``-u^2``
is ``-(u^2)`` and ``2^-1`` is accepted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ValidationError
from .nodes import CONSTANTS, FUNCTIONS, VARIABLES, BinOp, Call, Const, Expression, Neg, Num, Var

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_OPERAND_START = frozenset({"number", "identifier", "'('", "'-'"})
_AFTER_OPERAND = frozenset({"'+'", "'-'", "'*'", "'/'", "'^'"})
_END = "end of input"


class ExprSyntaxError(ValidationError):
    def __init__(self, source: str, offset: int, expected, found: str):
        self.source = source
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"syntax error at byte {offset}: found {found}, expected one of {{{exp}}}")


class UnknownIdentifierError(ValidationError):
    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        known = ", ".join(VARIABLES + tuple(CONSTANTS) + FUNCTIONS)
        super().__init__(f"unknown identifier {name!r} at byte {offset} (known: {known})")


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | end
    text: str
    offset: int  # byte offset into the UTF-8 encoding

    def describe(self) -> str:
        if self.kind == "end":
            return _END
        return repr(self.text)


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        offset = len(source[:pos].encode("utf-8"))
        if m is None:
            raise ExprSyntaxError(source, offset, _OPERAND_START | _AFTER_OPERAND, repr(source[pos]))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), offset))
        pos = m.end()
    tokens.append(_Token("end", "", len(source.encode("utf-8"))))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0
        self.depth = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, expected) -> ExprSyntaxError:
        return ExprSyntaxError(self.source, self.tok.offset, expected, self.tok.describe())

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def parse(self) -> Expression:
        e = self.expr()
        if self.tok.kind != "end":
            closers = {"')'"} if self.depth else set()
            raise self.error(_AFTER_OPERAND | closers | {_END})
        return e

    def expr(self) -> Expression:
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expression:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expression:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expression:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text in CONSTANTS:
                return Const(tok.text)
            if tok.text in FUNCTIONS:
                if not self.accept("("):
                    raise self.error({"'('"})
                arg = self.parenthesized()
                return Call(tok.text, arg)
            raise UnknownIdentifierError(tok.text, tok.offset)
        if self.accept("("):
            return self.parenthesized()
        raise self.error(_OPERAND_START)

    def parenthesized(self) -> Expression:
        self.depth += 1
        e = self.expr()
        if not self.accept(")"):
            raise self.error(_AFTER_OPERAND | {"')'"})
        self.depth -= 1
        return e


def parse(source: str) -> Expression:
    """Parse ``source`` into an expression tree.

    Raises
    ------
    ExprSyntaxError
        With the byte offset of the offending token and the set of tokens
        that would have been accepted there.
    UnknownIdentifierError
        For names other than u, v, pi, e and the supported functions.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return _Parser(source).parse()
