"""Recursive-descent parser for exact expressions.

Grammar::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary | implicit)*
    unary   := ("+" | "-") unary | power
    power   := atom ("^" unary)?
    atom    := NUMBER | NAME | "(" expr ")"

``implicit`` is juxtaposition after a number (``3i``, ``2t``, ``4(t-1)``).
Exponents must evaluate to integer constants. ``i`` is the imaginary unit
in Gaussian contexts and is rejected as a variable name elsewhere.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable

from .numbers import GaussianRational
from .poly import Polynomial
from .ratfunc import RationalFunction

__all__ = ["ParseError", "parse_rational", "parse_polynomial", "parse_gaussian", "parse_number"]

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([a-zA-Z_][a-zA-Z0-9_]*)|(\*\*|[-+*/^()]))")


class ParseError(ValueError):
    def __init__(self, message: str, text: str, column: int):
        self.text = text
        self.column = column
        super().__init__(f"{message} at column {column + 1} in {text!r}")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[col]!r}", text, col)
        num, name, op = m.groups()
        col = m.start(m.lastindex)
        if num is not None:
            out.append(("num", num, col))
        elif name is not None:
            out.append(("name", name, col))
        else:
            out.append(("op", "^" if op == "**" else op, col))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str, make_name, make_num):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.make_name = make_name
        self.make_num = make_num

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        val = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while True:
            kind, v, _ = self.peek()
            if kind == "op" and v in "*/":
                tok = self.take()
                rhs = self.unary()
                if v == "*":
                    val = val * rhs
                else:
                    try:
                        val = val / rhs
                    except ZeroDivisionError:
                        self.fail("division by zero", tok)
            elif kind in ("name", "num") or (kind == "op" and v == "("):
                prev = self.toks[self.i - 1]
                if prev[0] != "num" and not (prev[0] == "op" and prev[1] == ")"):
                    self.fail("missing operator")
                val = val * self.power()
            else:
                return val

    def unary(self):
        kind, v, _ = self.peek()
        if kind == "op" and v in "+-":
            self.take()
            operand = self.unary()
            return -operand if v == "-" else operand
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            tok = self.take()
            exp = self.unary()
            k = _as_int(exp)
            if k is None:
                self.fail("exponent must be an integer constant", tok)
            try:
                return base ** k
            except ZeroDivisionError:
                self.fail("zero raised to a negative power", tok)
        return base

    def atom(self):
        tok = self.take()
        kind, v, _ = tok
        if kind == "num":
            return self.make_num(Fraction(v))
        if kind == "name":
            return self.make_name(v, tok, self)
        if kind == "op" and v == "(":
            val = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.fail("expected ')'")
            self.take()
            return val
        self.fail(f"unexpected token {v!r}" if v else "unexpected end of expression", tok)


def _as_int(x):
    try:
        if isinstance(x, RationalFunction):
            if not x.is_constant():
                return None
            x = x.constant_value()
        elif isinstance(x, GaussianRational):
            if x.imag != 0:
                return None
            x = x.real
        x = Fraction(x)
    except (TypeError, ValueError):
        return None
    return int(x) if x.denominator == 1 else None


def parse_rational(text: str, variables: Iterable[str] | None = None) -> RationalFunction:
    """Parse into a RationalFunction; ``variables`` (if given) whitelists names."""
    allowed = None if variables is None else set(variables)

    def make_name(name, tok, parser):
        if name == "i":
            parser.fail("'i' is reserved for the imaginary unit", tok)
        if allowed is not None and name not in allowed:
            parser.fail(f"unknown variable {name!r}", tok)
        return RationalFunction(Polynomial.var(name))

    return _Parser(text, make_name, lambda q: RationalFunction(Polynomial.constant(q))).parse()


def parse_polynomial(text: str, variables: Iterable[str] | None = None) -> Polynomial:
    r = parse_rational(text, variables)
    if not r.is_polynomial():
        raise ParseError("expected a polynomial", text, 0)
    return r.numerator * (1 / r.denominator.constant_value())


def parse_gaussian(text: str) -> GaussianRational:
    """Parse a constant in Q(i)."""

    def make_name(name, tok, parser):
        if name != "i":
            parser.fail(f"unexpected variable {name!r} in a constant", tok)
        return GaussianRational(0, 1)

    return _Parser(str(text), make_name, lambda q: GaussianRational(q)).parse()


def parse_number(text) -> Fraction | GaussianRational:
    """Parse a constant, returning a Fraction when it is real."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    g = parse_gaussian(str(text))
    return g.real if g.imag == 0 else g
