"""Rational functions over Q in canonical content-normalized form."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

from .poly import Polynomial, _sorted_vars, gcd, lcm

__all__ = ["RationalFunction"]


class RationalFunction:
    """``numerator / denominator`` with both polynomials in Z[t].

    Canonical form: common factors cancelled, integer coefficients whose gcd
    across numerator and denominator is 1, positive leading denominator
    coefficient. Zero is ``0/1``.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator=None, *, _canonical=False):
        num = Polynomial._coerce(numerator)
        den = Polynomial._coerce(1 if denominator is None else denominator)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _canonical:
            num, den = _canonicalize(num, den)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def coerce(cls, x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        return cls(x)

    @property
    def variables(self) -> tuple[str, ...]:
        return _sorted_vars(self.numerator.variables + self.denominator.variables)

    def free_variables(self) -> tuple[str, ...]:
        return _sorted_vars(self.numerator.free_variables() + self.denominator.free_variables())

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_polynomial(self) -> bool:
        return self.denominator.is_constant()

    def is_constant(self) -> bool:
        return self.numerator.is_constant() and self.denominator.is_constant()

    def constant_value(self) -> Fraction:
        return self.numerator.constant_value() / self.denominator.constant_value()

    def integer_coefficients(self) -> list[int]:
        return self.numerator.integer_coefficients() + self.denominator.integer_coefficients()

    def degree(self) -> int:
        """max(total degree of numerator, total degree of denominator)."""
        return max(self.numerator.degree(), self.denominator.degree(), 0)

    # arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if self.denominator == o.denominator:
            return RationalFunction(self.numerator + o.numerator, self.denominator)
        return RationalFunction(self.numerator * o.denominator + o.numerator * self.denominator,
                                self.denominator * o.denominator)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator, _canonical=True)

    def __sub__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return RationalFunction(self.numerator * o.numerator, self.denominator * o.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.numerator * o.denominator, self.denominator * o.numerator)

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return RationalFunction(1) / (self ** (-k))
        return RationalFunction(self.numerator ** k, self.denominator ** k)

    def __eq__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return self.numerator == o.numerator and self.denominator == o.denominator

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def __bool__(self):
        return not self.is_zero()

    # calculus -----------------------------------------------------------------
    def diff(self, var: str) -> "RationalFunction":
        n, d = self.numerator, self.denominator
        return RationalFunction(n.diff(var) * d - n * d.diff(var), d * d)

    def compose(self, mapping: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        """Substitute rational functions for variables."""
        mapping = {v: RationalFunction.coerce(f) for v, f in mapping.items()}
        return _compose_poly(self.numerator, mapping) / _compose_poly(self.denominator, mapping)

    def evaluate(self, point: Mapping):
        den = self.denominator.evaluate(point)
        if den == 0:
            raise ZeroDivisionError("rational function evaluated at a pole")
        return self.numerator.evaluate(point) / den

    # display ------------------------------------------------------------------
    def __str__(self):
        if self.denominator == 1:
            return str(self.numerator)
        return f"({self.numerator})/({self.denominator})"

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"


def _compose_poly(p: Polynomial, mapping: Mapping[str, RationalFunction]) -> RationalFunction:
    keep = [v for v in p.variables if v not in mapping]
    out = RationalFunction(Polynomial.constant(0, keep))
    powers: dict = {}
    for e, c in p.terms.items():
        rest = tuple(k for v, k in zip(p.variables, e) if v not in mapping)
        term = RationalFunction(Polynomial(keep, {rest: c}))
        for v, k in zip(p.variables, e):
            if k and v in mapping:
                if (v, k) not in powers:
                    powers[(v, k)] = mapping[v] ** k
                term = term * powers[(v, k)]
        out = out + term
    return out


def _canonicalize(num: Polynomial, den: Polynomial):
    vs = _sorted_vars(num.variables + den.variables)
    num, den = num.with_variables(vs), den.with_variables(vs)
    if num.is_zero():
        return num, Polynomial.constant(1, vs)
    if not den.is_constant():
        g = gcd(num, den)
        if not g.is_constant():
            num, den = num.exact_div(g), den.exact_div(g)
    coeffs = list(num.terms.values()) + list(den.terms.values())
    lcd = reduce(math.lcm, (c.denominator for c in coeffs), 1)
    g = reduce(math.gcd, (abs(int(c * lcd)) for c in coeffs), 0)
    scale = Fraction(lcd, g)
    if den.leading_coefficient() < 0:
        scale = -scale
    return num * scale, den * scale


def common_denominator(funcs: Iterable[RationalFunction]) -> Polynomial:
    out = Polynomial.constant(1)
    for f in funcs:
        out = lcm(out, f.denominator)
    return out
