"""Exact scalars: rationals (``fractions.Fraction``) and Gaussian rationals."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["GaussianRational", "as_exact", "is_real_exact", "exact_to_complex"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class GaussianRational:
    """Element ``re + im*i`` of Q(i) with exact rational parts."""

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        object.__setattr__(self, "real", _frac(real))
        object.__setattr__(self, "imag", _frac(imag))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return cls(_frac(x), 0)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.real + o.real, self.imag + o.imag)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.real, -self.imag)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.real - o.real, self.imag - o.imag)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.real * o.real - self.imag * o.imag,
                                self.real * o.imag + self.imag * o.real)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        n2 = o.norm2()
        if n2 == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * o.conjugate()
        return GaussianRational(num.real / n2, num.imag / n2)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussianRational(1) / (self ** (-k))
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.real, -self.imag)

    def norm2(self) -> Fraction:
        return self.real * self.real + self.imag * self.imag

    def is_real(self) -> bool:
        return self.imag == 0

    # comparison / hashing ------------------------------------------------
    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.real == o.real and self.imag == o.imag

    def __hash__(self):
        if self.imag == 0:
            return hash(self.real)
        return hash((self.real, self.imag))

    def __bool__(self):
        return bool(self.real) or bool(self.imag)

    def __complex__(self):
        return complex(float(self.real), float(self.imag))

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        if self.imag == 0:
            return str(self.real)
        if self.real == 0:
            return f"{self.imag}i" if self.imag != 1 else "i"
        sign = "+" if self.imag > 0 else "-"
        mag = abs(self.imag)
        im = "i" if mag == 1 else f"{mag}i"
        return f"{self.real}{sign}{im}"


def as_exact(x):
    """Return ``x`` as a Fraction when real, else as a GaussianRational."""
    if isinstance(x, GaussianRational):
        return x.real if x.imag == 0 else x
    return _frac(x)


def is_real_exact(x) -> bool:
    return not isinstance(x, GaussianRational) or x.imag == 0


def exact_to_complex(x) -> complex:
    if isinstance(x, GaussianRational):
        return complex(x)
    return complex(float(x))
