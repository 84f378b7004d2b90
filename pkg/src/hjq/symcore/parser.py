"""Recursive-descent parser for the expression grammar.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | base ('^' integer)?
    base   := number | identifier | func '(' expr ')' | '(' expr ')'
    number := integer ('/' integer)?

Unary minus binds looser than '^', so "-x^2" is -(x^2).  Exponents may carry a
leading '-'.  Offsets in errors are 0-based character
positions into the input.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from fractions import Fraction

from hjq.symcore.expr import FUNCTIONS, Add, Div, Expr, Func, Mul, Num, Pow, Symbol

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifier(ParseError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r}", offset)
        self.name = name


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("id", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, table: Mapping[str, Symbol]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.table = table

    def peek(self, offset: int = 0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            what = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {value!r}, found {what}", pos)

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else Mul.of(Num(-1), t))
        return Add.of(*terms)

    def term(self) -> Expr:
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.factor()
            node = Mul.of(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            inner = self.factor()
            if isinstance(inner, Num):
                return Num(-inner.value)
            return Mul.of(Num(-1), inner)
        node = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            kind, text, pos = self.take()
            if kind != "int":
                what = "end of input" if kind == "end" else repr(text)
                raise ParseError(f"expected integer exponent, found {what}", pos)
            node = Pow(node, sign * int(text))
        return node

    def base(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "int":
            nxt, after = self.peek(), self.peek(1)
            # "3/4" is a literal unless an exponent follows: 3/4^2 is 3/16
            if nxt[:2] == ("op", "/") and after[0] == "int" and self.peek(2)[:2] != ("op", "^"):
                self.i += 2
                return Num(Fraction(int(text), int(after[1])))
            return Num(int(text))
        if kind == "id":
            if text in FUNCTIONS and self.peek()[:2] == ("op", "("):
                self.take()
                arg = self.expr()
                self.expect(")")
                return Func(text, arg)
            sym = self.table.get(text)
            if sym is None:
                raise UnknownIdentifier(text, pos)
            return sym
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", pos)


def parse_expr(text: str, table: Mapping[str, Symbol]) -> Expr:
    """Parse ``text``; every identifier must be a key of ``table``."""
    p = _Parser(text, table)
    node = p.expr()
    kind, tok, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {tok!r}", pos)
    return node
